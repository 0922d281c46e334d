//! Channel JSON interchange.
//!
//! `{"name": str, "dim_in": int, "dim_out": int, "kraus": [op][row][col] = [re, im]}`,
//! written compactly with shortest round-trip floats.

use crate::channel::{KrausChannel, ValidationReport};
use crate::config::Tolerances;
use crate::error::{QpdError, Result};
use crate::qmat::ComplexMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    name: String,
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

/// Compact JSON text of a channel, newline-terminated.
pub fn channel_to_json(ch: &KrausChannel) -> String {
    let file = ChannelFile {
        name: ch.name().unwrap_or("").to_string(),
        dim_in: ch.dim_in(),
        dim_out: ch.dim_out(),
        kraus: ch.kraus().iter().map(matrix_to_rows).collect(),
    };
    let mut s = serde_json::to_string(&file).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone)]
pub struct LoadedChannel {
    pub channel: KrausChannel,
    pub validation: ValidationReport,
    /// Set when the Kraus set misses completeness by more than `residual_tol`.
    pub tp_warning: bool,
}

/// Parses and validates channel JSON. Shape errors name the offending field;
/// a TP failure loads with `tp_warning` set.
pub fn channel_from_json(text: &str) -> Result<LoadedChannel> {
    let file: ChannelFile = serde_json::from_str(text)
        .map_err(|e| QpdError::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    if file.dim_in == 0 || file.dim_out == 0 {
        return Err(QpdError::Parse("dim_in and dim_out must be positive".into()));
    }
    if file.kraus.is_empty() {
        return Err(QpdError::Parse("kraus: at least one operator required".into()));
    }
    let mut ops = Vec::with_capacity(file.kraus.len());
    for (k, op) in file.kraus.iter().enumerate() {
        if op.len() != file.dim_out {
            return Err(QpdError::Parse(format!("kraus[{k}]: {} rows, expected dim_out = {}", op.len(), file.dim_out)));
        }
        let mut data = Vec::with_capacity(file.dim_out * file.dim_in);
        for (r, row) in op.iter().enumerate() {
            if row.len() != file.dim_in {
                return Err(QpdError::Parse(format!(
                    "kraus[{k}][{r}]: {} columns, expected dim_in = {}",
                    row.len(),
                    file.dim_in
                )));
            }
            for (c, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(QpdError::Parse(format!("kraus[{k}][{r}][{c}]: non-finite entry")));
                }
                data.push(C64::new(re, im));
            }
        }
        ops.push(ComplexMatrix::new(file.dim_out, file.dim_in, data)?);
    }
    let mut channel = KrausChannel::new(file.dim_in, file.dim_out, ops)?;
    if !file.name.is_empty() {
        channel = channel.named(file.name);
    }
    let validation = channel.validate()?;
    let tp_warning = !validation.is_tp(&Tolerances::default());
    Ok(LoadedChannel { channel, validation, tp_warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn round_trip_is_byte_identical() {
        let ch = zoo::horodecki_channel(3.5).unwrap();
        let a = channel_to_json(&ch);
        let loaded = channel_from_json(&a).unwrap();
        assert!(!loaded.tp_warning);
        assert_eq!(loaded.channel, ch);
        assert_eq!(channel_to_json(&loaded.channel), a);
    }

    #[test]
    fn tp_failure_loads_with_warning() {
        let loaded = channel_from_json(&channel_to_json(&zoo::m_ae_channel())).unwrap();
        assert!(loaded.tp_warning);
        assert!(loaded.validation.tp_residual > 0.1);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = channel_from_json(r#"{"name":"x","dim_in":2,"dim_out":2,"kraus":[[[[1,0],[0,0]]]]}"#).unwrap_err();
        assert!(err.to_string().contains("kraus[0]"), "{err}");
        let err = channel_from_json(r#"{"name":"x","dim_in":2,"dim_out":1,"kraus":[[[[1,0]]]]}"#).unwrap_err();
        assert!(err.to_string().contains("kraus[0][0]"), "{err}");
        let err = channel_from_json("{\"name\": \"x\",\n \"dim_in\": 2").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = channel_from_json(r#"{"name":"x","dim_out":1,"kraus":[]}"#).unwrap_err();
        assert!(err.to_string().contains("dim_in"), "{err}");
    }
}
