//! Macro-financial classifiers: financial-depth tiering and capital-bonanza
//! detection.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{TimeIndex, TimeSeries};
use crate::table::{Cell, Table};

/// Development tier of a financial-depth indicator, from deepest to
/// shallowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum DepthTier {
    Startup,
    Takeoff,
    Emerging,
    Developed,
}

impl DepthTier {
    pub fn label(self) -> &'static str {
        match self {
            DepthTier::Developed => "pays développé",
            DepthTier::Emerging => "pays émergent",
            DepthTier::Takeoff => "pays en décollage",
            DepthTier::Startup => "pays en démarrage",
        }
    }
}

/// Tiering against cutoffs `(developed, emerging, takeoff)` with
/// "supérieur à" strict on the top band and "au moins" inclusive below.
fn tier(value: f64, cutoffs: (f64, f64, f64)) -> DepthTier {
    let (developed, emerging, takeoff) = cutoffs;
    if value > developed {
        DepthTier::Developed
    } else if value >= emerging {
        DepthTier::Emerging
    } else if value >= takeoff {
        DepthTier::Takeoff
    } else {
        DepthTier::Startup
    }
}

/// Depth classification of a financial system, one tier per indicator.
#[derive(Debug, Clone, Serialize)]
pub struct DepthProfile {
    pub credit_to_gdp: f64,
    pub credit_to_gdp_tier: DepthTier,
    pub liquid_liabilities_to_gdp: f64,
    pub liquid_liabilities_tier: DepthTier,
    pub credit_to_deposits: Option<f64>,
    pub credit_to_deposits_tier: Option<DepthTier>,
}

impl DepthProfile {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(vec!["Indicateur".into(), "Valeur (%)".into(), "Profil".into()])
            .with_title("Indicateurs de profondeur du système financier");
        t.push_row(vec![
            Cell::text("Crédit bancaire au secteur privé/PIB"),
            Cell::Num(self.credit_to_gdp),
            Cell::text(self.credit_to_gdp_tier.label()),
        ]);
        t.push_row(vec![
            Cell::text("Passifs liquides/PIB"),
            Cell::Num(self.liquid_liabilities_to_gdp),
            Cell::text(self.liquid_liabilities_tier.label()),
        ]);
        if let (Some(v), Some(tier)) = (self.credit_to_deposits, self.credit_to_deposits_tier) {
            t.push_row(vec![
                Cell::text("Crédit bancaire au secteur privé/Dépôt"),
                Cell::Num(v),
                Cell::text(tier.label()),
            ]);
        }
        t
    }
}

/// Classifies financial depth (inputs in percent). Bands: credit/GDP
/// `>70 / >=60 / >=20 / <20`, liquid liabilities/GDP `>55 / >=45 / >=25 / <25`,
/// credit/deposits `>95 / >=80 / >=60 / <60`.
pub fn classify_depth(
    credit_gdp: f64,
    liquid_gdp: f64,
    credit_deposits: Option<f64>,
) -> Result<DepthProfile> {
    for (name, v) in [("credit/GDP", credit_gdp), ("liquid/GDP", liquid_gdp)] {
        if v < 0.0 {
            return Err(Error::InvalidArg(format!("{name} must be non-negative, got {v}")));
        }
    }
    if let Some(v) = credit_deposits {
        if v < 0.0 {
            return Err(Error::InvalidArg(format!(
                "credit/deposits must be non-negative, got {v}"
            )));
        }
    }
    Ok(DepthProfile {
        credit_to_gdp: credit_gdp,
        credit_to_gdp_tier: tier(credit_gdp, (70.0, 60.0, 20.0)),
        liquid_liabilities_to_gdp: liquid_gdp,
        liquid_liabilities_tier: tier(liquid_gdp, (55.0, 45.0, 25.0)),
        credit_to_deposits: credit_deposits,
        credit_to_deposits_tier: credit_deposits.map(|v| tier(v, (95.0, 80.0, 60.0))),
    })
}

/// Sign convention of a current-account series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignConvention {
    /// Deficits are negative values (balance convention).
    DeficitNegative,
    /// Deficits are positive values (deficit-ratio convention).
    DeficitPositive,
}

impl std::str::FromStr for SignConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "deficit-negative" | "balance" => Ok(SignConvention::DeficitNegative),
            "deficit-positive" | "deficit" => Ok(SignConvention::DeficitPositive),
            other => Err(Error::InvalidArg(format!("unknown sign convention {other:?}"))),
        }
    }
}

/// Trade-openness preset for the bonanza threshold: 2% of GDP for relatively
/// closed economies, 6.6% for open ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Openness {
    Closed,
    Open,
}

impl Openness {
    pub fn threshold(self) -> f64 {
        match self {
            Openness::Closed => 2.0,
            Openness::Open => 6.6,
        }
    }
}

impl std::str::FromStr for Openness {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "closed" => Ok(Openness::Closed),
            "open" => Ok(Openness::Open),
            other => Err(Error::InvalidArg(format!("unknown openness {other:?}"))),
        }
    }
}

/// One period's bonanza evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct BonanzaFlag {
    pub period: String,
    /// Current-account deficit as a positive percent of GDP (surpluses are
    /// negative here).
    pub deficit_ratio: f64,
    pub threshold: f64,
    pub is_bonanza: bool,
}

/// Flags capital-bonanza periods: a bonanza is a current-account deficit
/// ratio strictly above the threshold. The threshold must be given explicitly
/// or through an openness preset; there is no default.
pub fn detect_bonanza(
    current_account_gdp: &TimeSeries,
    convention: SignConvention,
    threshold: Option<f64>,
    openness: Option<Openness>,
) -> Result<Vec<BonanzaFlag>> {
    let threshold = match (threshold, openness) {
        (Some(t), _) => t,
        (None, Some(o)) => o.threshold(),
        (None, None) => {
            return Err(Error::InvalidArg(
                "bonanza detection needs an explicit threshold or an openness preset".into(),
            ))
        }
    };
    if threshold <= 0.0 {
        return Err(Error::InvalidArg(format!("threshold must be positive, got {threshold}")));
    }
    let mut flags = Vec::new();
    for t in 0..current_account_gdp.len() {
        if let Some(v) = current_account_gdp.get(t) {
            let deficit_ratio = match convention {
                SignConvention::DeficitNegative => -v,
                SignConvention::DeficitPositive => v,
            };
            flags.push(BonanzaFlag {
                period: current_account_gdp.index().label(t),
                deficit_ratio,
                threshold,
                is_bonanza: deficit_ratio > threshold,
            });
        }
    }
    Ok(flags)
}

/// Re-joins bonanza flags onto a time index as a 0/1 series, usable as a VAR
/// input. Periods without a flag stay missing.
pub fn bonanza_series(name: &str, index: &TimeIndex, flags: &[BonanzaFlag]) -> Result<TimeSeries> {
    let mut values = vec![None; index.len()];
    for f in flags {
        if let Some(pos) = (0..index.len()).find(|&i| index.label(i) == f.period) {
            values[pos] = Some(if f.is_bonanza { 1.0 } else { 0.0 });
        }
    }
    TimeSeries::new(name, index.clone(), values)
}

pub fn bonanza_table(flags: &[BonanzaFlag]) -> Table {
    let mut t = Table::new(vec![
        "Période".into(),
        "Déficit courant/PIB (%)".into(),
        "Seuil (%)".into(),
        "Bonanza".into(),
    ])
    .with_title("Détection des bonanzas de capitaux");
    for f in flags {
        t.push_row(vec![
            Cell::text(&f.period),
            Cell::Num(f.deficit_ratio),
            Cell::Num(f.threshold),
            Cell::text(if f.is_bonanza { "oui" } else { "non" }),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{Frequency, Period};

    #[test]
    fn drc_reading_is_startup() {
        let p = classify_depth(0.9, 6.2, None).unwrap();
        assert_eq!(p.credit_to_gdp_tier, DepthTier::Startup);
        assert_eq!(p.liquid_liabilities_tier, DepthTier::Startup);
        assert!(p.credit_to_deposits_tier.is_none());
    }

    #[test]
    fn inclusive_and_strict_boundaries() {
        assert_eq!(classify_depth(60.0, 30.0, None).unwrap().credit_to_gdp_tier, DepthTier::Emerging);
        assert_eq!(classify_depth(70.0, 30.0, None).unwrap().credit_to_gdp_tier, DepthTier::Emerging);
        assert_eq!(classify_depth(75.0, 30.0, None).unwrap().credit_to_gdp_tier, DepthTier::Developed);
        assert_eq!(classify_depth(20.0, 30.0, None).unwrap().credit_to_gdp_tier, DepthTier::Takeoff);
    }

    #[test]
    fn negative_input_errors() {
        assert!(classify_depth(-1.0, 5.0, None).is_err());
        assert!(classify_depth(1.0, 5.0, Some(-2.0)).is_err());
    }

    #[test]
    fn monotone_in_each_input() {
        let mut last = DepthTier::Startup;
        for v in [0.0, 19.9, 20.0, 59.9, 60.0, 70.0, 70.1, 200.0] {
            let tier = classify_depth(v, 0.0, None).unwrap().credit_to_gdp_tier;
            assert!(tier >= last, "tier dropped at {v}");
            last = tier;
        }
    }

    fn annual(name: &str, start_year: i32, values: Vec<f64>) -> TimeSeries {
        let start = Period::new(Frequency::Annual, start_year, 0).unwrap();
        let index = TimeIndex::new(start, values.len()).unwrap();
        TimeSeries::from_values(name, index, values).unwrap()
    }

    #[test]
    fn bonanza_presets() {
        let ca = annual("CA", 2008, vec![-0.8, -6.1, -10.5, -5.2, -6.1, -10.6, -9.1, -7.6]);
        let open =
            detect_bonanza(&ca, SignConvention::DeficitNegative, None, Some(Openness::Open))
                .unwrap();
        let bonanzas: Vec<&str> = open
            .iter()
            .filter(|f| f.is_bonanza)
            .map(|f| f.period.as_str())
            .collect();
        assert_eq!(bonanzas, vec!["2010", "2013", "2014", "2015"]);

        let closed =
            detect_bonanza(&ca, SignConvention::DeficitNegative, None, Some(Openness::Closed))
                .unwrap();
        assert!(!closed[0].is_bonanza); // 2008: -0.8
        assert!(closed[1].is_bonanza); // 2009: -6.1
    }

    #[test]
    fn surplus_is_never_a_bonanza() {
        let ca = annual("CA", 2010, vec![3.0, 3.0]);
        let flags =
            detect_bonanza(&ca, SignConvention::DeficitNegative, Some(0.1), None).unwrap();
        assert!(flags.iter().all(|f| !f.is_bonanza));
    }

    #[test]
    fn threshold_is_required() {
        let ca = annual("CA", 2010, vec![-3.0]);
        assert!(detect_bonanza(&ca, SignConvention::DeficitNegative, None, None).is_err());
    }

    #[test]
    fn raising_threshold_never_adds_flags() {
        let ca = annual("CA", 2008, vec![-0.8, -6.1, -10.5, -5.2, -6.1, -10.6, -9.1, -7.6]);
        let mut previous = usize::MAX;
        for threshold in [1.0, 2.0, 5.0, 6.6, 9.0, 11.0] {
            let count = detect_bonanza(&ca, SignConvention::DeficitNegative, Some(threshold), None)
                .unwrap()
                .iter()
                .filter(|f| f.is_bonanza)
                .count();
            assert!(count <= previous);
            previous = count;
        }
    }

    #[test]
    fn flags_join_back_as_binary_series() {
        let ca = annual("CA", 2010, vec![-3.0, -1.0, -8.0]);
        let flags =
            detect_bonanza(&ca, SignConvention::DeficitNegative, Some(2.0), None).unwrap();
        let s = bonanza_series("BONANZA", ca.index(), &flags).unwrap();
        assert_eq!(s.values(), &[Some(1.0), Some(0.0), Some(1.0)]);
    }
}
