//! Exact rational bookkeeping of polar codeword-set fractions and rates.
//!
//! Every quantity is an asymptotic fraction `lim |set| / n`. The partition
//! model: `S_in = G_amp ∩ G_phase`, `P1 = G_amp ∩ B_phase`,
//! `P2 = B_amp ∩ G_phase`, `B = B_amp ∩ B_phase`, with `P1′ ⊆ P1` and
//! `P2′ ⊆ P2` the PD-recoverable parts.

use crate::error::{QpdError, Result};
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

pub type Q = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    Degradable,
    DegradablePd,
    AntiDegradable,
    AntiDegradablePd,
}

impl Regime {
    pub fn is_degradable(self) -> bool {
        matches!(self, Regime::Degradable | Regime::DegradablePd)
    }

    pub fn is_pd(self) -> bool {
        matches!(self, Regime::DegradablePd | Regime::AntiDegradablePd)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Degradable => "DEGRADABLE",
            Regime::DegradablePd => "DEGRADABLE_PD",
            Regime::AntiDegradable => "ANTI_DEGRADABLE",
            Regime::AntiDegradablePd => "ANTI_DEGRADABLE_PD",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "DEGRADABLE" => Regime::Degradable,
            "DEGRADABLE_PD" => Regime::DegradablePd,
            "ANTI_DEGRADABLE" => Regime::AntiDegradable,
            "ANTI_DEGRADABLE_PD" => Regime::AntiDegradablePd,
            other => return Err(QpdError::Parse(format!("unknown regime '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarLedger {
    pub regime: Regime,
    pub g_amp: Q,
    /// Optional; when present it must equal `g_amp - p1 + p2`.
    pub g_phase: Option<Q>,
    pub p1: Q,
    pub p1_prime: Q,
    pub p2: Q,
    pub p2_prime: Q,
    pub b: Q,
}

impl PolarLedger {
    pub fn new(regime: Regime, g_amp: Q, p1: Q, p1_prime: Q, b: Q) -> Self {
        Self { regime, g_amp, g_phase: None, p1, p1_prime, p2: Q::zero(), p2_prime: Q::zero(), b }
    }

    fn fractions(&self) -> Vec<(&'static str, Q)> {
        let mut v = vec![("g_amp", self.g_amp)];
        if let Some(g) = self.g_phase {
            v.push(("g_phase", g));
        }
        v.extend([
            ("p1", self.p1),
            ("p1_prime", self.p1_prime),
            ("p2", self.p2),
            ("p2_prime", self.p2_prime),
            ("b", self.b),
        ]);
        v
    }
}

fn regime_error(op: &str, l: &PolarLedger) -> QpdError {
    QpdError::DomainError(format!("{op} does not apply to regime {}", l.regime.as_str()))
}

/// `g_amp - p1`: the `S_in` fraction without PD recovery. Accepts both
/// degradable regimes; on a PD ledger it is the baseline the PD rate improves on.
pub fn rate_degradable(l: &PolarLedger) -> Result<Q> {
    if !l.regime.is_degradable() {
        return Err(regime_error("rate_degradable", l));
    }
    Ok(l.g_amp - l.p1)
}

/// `g_amp - p1 - b`, the anti-degradable counterpart of [`rate_degradable`].
pub fn rate_antidegradable(l: &PolarLedger) -> Result<Q> {
    if l.regime.is_degradable() {
        return Err(regime_error("rate_antidegradable", l));
    }
    Ok(l.g_amp - l.p1 - l.b)
}

/// `Δ = p1′`.
pub fn delta(l: &PolarLedger) -> Q {
    l.p1_prime
}

/// `Δ` from the two environment rates, for cross-checking [`delta`].
pub fn delta_from_rates(r_ae: Q, r_ae_prime: Q) -> Q {
    r_ae - r_ae_prime
}

/// `g_amp - (p1 - p1′)`.
pub fn rate_pd_degradable(l: &PolarLedger) -> Result<Q> {
    if l.regime != Regime::DegradablePd {
        return Err(regime_error("rate_pd_degradable", l));
    }
    Ok(l.g_amp - (l.p1 - l.p1_prime))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiDegradableRates {
    pub gross: Q,
    pub net: Q,
    pub entanglement_rate: Q,
}

/// Gross `g_amp - (p1 - p1′) - b`; entanglement is consumed at rate `b`.
pub fn rate_pd_antidegradable(l: &PolarLedger) -> Result<AntiDegradableRates> {
    if l.regime != Regime::AntiDegradablePd {
        return Err(regime_error("rate_pd_antidegradable", l));
    }
    let gross = l.g_amp - (l.p1 - l.p1_prime) - l.b;
    Ok(AntiDegradableRates { gross, net: gross - l.b, entanglement_rate: l.b })
}

/// The rate the regime's own operation reports.
pub fn regime_rate(l: &PolarLedger) -> Q {
    match l.regime {
        Regime::Degradable => l.g_amp - l.p1,
        Regime::DegradablePd => l.g_amp - (l.p1 - l.p1_prime),
        Regime::AntiDegradable => l.g_amp - l.p1 - l.b,
        Regime::AntiDegradablePd => l.g_amp - (l.p1 - l.p1_prime) - l.b,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolevoTriples {
    pub chi_ab: Q,
    pub chi_ae: Q,
    pub chi_ae_prime: Q,
}

impl HolevoTriples {
    /// `χ(AB) - χ(AE′)`.
    pub fn rate(&self) -> Q {
        self.chi_ab - self.chi_ae_prime
    }
}

pub fn holevo_triples(l: &PolarLedger) -> HolevoTriples {
    let anti = if l.regime.is_degradable() { Q::zero() } else { l.b };
    HolevoTriples {
        chi_ab: l.g_amp + l.p2_prime,
        chi_ae: l.p1 + l.p2 + anti,
        chi_ae_prime: l.p1 - l.p1_prime + anti,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

/// Checks ranges, inclusions, regime constraints and the cover identity
/// (`s_in + (p1 - p1′) = 1`, plus `2b` when anti-degradable).
pub fn validate_partition(l: &PolarLedger) -> PartitionReport {
    let mut v = Vec::new();
    for (name, q) in l.fractions() {
        if q < Q::zero() || q > Q::one() {
            v.push(format!("{name} = {q} outside [0, 1]"));
        }
    }
    if l.p1_prime > l.p1 {
        v.push(format!("p1_prime = {} exceeds p1 = {}", l.p1_prime, l.p1));
    }
    if l.p2_prime > l.p2 {
        v.push(format!("p2_prime = {} exceeds p2 = {}", l.p2_prime, l.p2));
    }
    if !l.p2.is_zero() {
        v.push(format!("p2 = {} must vanish", l.p2));
    }
    if l.regime.is_degradable() && !l.b.is_zero() {
        v.push(format!("b = {} must vanish for a degradable regime", l.b));
    }
    if !l.regime.is_pd() && !l.p1_prime.is_zero() {
        v.push(format!("p1_prime = {} must vanish outside the PD regimes", l.p1_prime));
    }
    if let Some(g) = l.g_phase {
        let want = l.g_amp - l.p1 + l.p2;
        if g != want {
            v.push(format!("g_phase = {g} but g_amp - p1 + p2 = {want}"));
        }
    }
    let s_in = regime_rate(l);
    let recovered = l.p1 - l.p1_prime;
    let cover = if l.regime.is_degradable() { s_in + recovered } else { s_in + recovered + l.b * 2 };
    if cover != Q::one() {
        v.push(format!("cover sums to {cover}, expected 1"));
    }
    PartitionReport { ok: v.is_empty(), violations: v }
}

// ------------------------------------------------------------------ JSON

fn parse_q(field: &str, v: &Value) -> Result<Q> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() => n.to_string(),
        _ => return Err(QpdError::Parse(format!("fractions.{field}: expected a \"p/q\" string"))),
    };
    let q: Q = s.trim().parse().map_err(|_| QpdError::Parse(format!("fractions.{field}: cannot parse '{s}'")))?;
    Ok(q)
}

/// Reads `{"regime": str, "fractions": {"g_amp": "4/5", ...}}`; absent fractions are zero.
pub fn ledger_from_json(text: &str) -> Result<PolarLedger> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| QpdError::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let regime = v
        .get("regime")
        .and_then(Value::as_str)
        .ok_or_else(|| QpdError::Parse("missing string field 'regime'".into()))?;
    let regime = Regime::parse(regime)?;
    let fr = v
        .get("fractions")
        .and_then(Value::as_object)
        .ok_or_else(|| QpdError::Parse("missing object field 'fractions'".into()))?;
    const KNOWN: [&str; 7] = ["g_amp", "g_phase", "p1", "p1_prime", "p2", "p2_prime", "b"];
    if let Some(k) = fr.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(QpdError::Parse(format!("fractions.{k}: unknown field")));
    }
    let get = |k: &str| -> Result<Q> { fr.get(k).map_or(Ok(Q::zero()), |x| parse_q(k, x)) };
    if !fr.contains_key("g_amp") {
        return Err(QpdError::Parse("fractions.g_amp: required".into()));
    }
    Ok(PolarLedger {
        regime,
        g_amp: get("g_amp")?,
        g_phase: fr.get("g_phase").map(|x| parse_q("g_phase", x)).transpose()?,
        p1: get("p1")?,
        p1_prime: get("p1_prime")?,
        p2: get("p2")?,
        p2_prime: get("p2_prime")?,
        b: get("b")?,
    })
}

pub fn ledger_to_json(l: &PolarLedger) -> Value {
    let fr: Map<String, Value> = l.fractions().into_iter().map(|(k, q)| (k.to_string(), json!(q.to_string()))).collect();
    json!({ "regime": l.regime.as_str(), "fractions": fr })
}

/// Every applicable rate and identity, rationals rendered as `"p/q"`.
pub fn ledger_report(l: &PolarLedger) -> Value {
    let s = |q: Q| Value::String(q.to_string());
    let mut rates = BTreeMap::new();
    rates.insert("delta", s(delta(l)));
    rates.insert("regime_rate", s(regime_rate(l)));
    if let Ok(r) = rate_degradable(l) {
        rates.insert("rate_degradable", s(r));
    }
    if let Ok(r) = rate_antidegradable(l) {
        rates.insert("rate_antidegradable", s(r));
    }
    if let Ok(r) = rate_pd_degradable(l) {
        rates.insert("rate_pd_degradable", s(r));
    }
    if let Ok(r) = rate_pd_antidegradable(l) {
        rates.insert("gross", s(r.gross));
        rates.insert("net", s(r.net));
        rates.insert("entanglement_rate", s(r.entanglement_rate));
    }
    let h = holevo_triples(l);
    json!({
        "ledger": ledger_to_json(l),
        "rates": rates,
        "holevo": { "chi_ab": s(h.chi_ab), "chi_ae": s(h.chi_ae), "chi_ae_prime": s(h.chi_ae_prime), "chi_ab_minus_chi_ae_prime": s(h.rate()) },
        "partition": validate_partition(l),
    })
}
