use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ScoreMatrix;
use crate::special::f_distribution_sf;

/// One-way ANOVA of implementation means on one environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub environment: String,
    pub implementations: Vec<String>,
    #[serde(with = "extended_f64")]
    pub f_statistic: f64,
    pub df_between: u64,
    pub df_within: u64,
    pub p_value: f64,
    /// p_value < alpha.
    pub reject: bool,
}

/// Classical one-way ANOVA on `groups`.
///
/// Values are centred on the first observation before any sums are formed,
/// and the between-group sum of squares uses the pairwise form
/// `Σ_{i<j} n_i n_j (m_i - m_j)² / N`, so groups with bitwise-equal means
/// produce exactly zero. When every value is identical the result is
/// `F = 0, p = 1`; zero within-group variance with distinct means gives
/// `F = ∞, p = 0`.
pub fn anova_oneway(environment: &str, groups: &[&[f64]], alpha: f64) -> Result<AnovaResult> {
    let fail = |message: String| Error::Anova {
        environment: environment.to_owned(),
        message,
    };
    if groups.len() < 2 {
        return Err(fail(format!("need >= 2 groups, got {}", groups.len())));
    }
    if let Some((i, g)) = groups.iter().enumerate().find(|(_, g)| g.len() < 2) {
        return Err(fail(format!("group {i} has {} value(s), need >= 2", g.len())));
    }
    if groups.iter().flat_map(|g| g.iter()).any(|v| !v.is_finite()) {
        return Err(fail("non-finite value".into()));
    }
    let origin = groups[0][0];
    let k = groups.len();
    let total: usize = groups.iter().map(|g| g.len()).sum();
    let means: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().map(|v| v - origin).sum::<f64>() / g.len() as f64)
        .collect();
    let mut ss_between = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            let d = means[i] - means[j];
            ss_between += (groups[i].len() * groups[j].len()) as f64 * d * d;
        }
    }
    ss_between /= total as f64;
    let ss_within: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.iter().map(|v| (v - origin - m).powi(2)).sum::<f64>())
        .sum();

    let df_between = (k - 1) as u64;
    let df_within = (total - k) as u64;
    let (f_statistic, p_value) = if ss_within == 0.0 {
        if ss_between == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY, 0.0)
        }
    } else {
        let f = (ss_between / df_between as f64) / (ss_within / df_within as f64);
        (f, f_distribution_sf(f, df_between, df_within)?)
    };
    Ok(AnovaResult {
        environment: environment.to_owned(),
        implementations: Vec::new(),
        f_statistic,
        df_between,
        df_within,
        p_value,
        reject: p_value < alpha,
    })
}

/// ANOVA per environment over the given implementations, using one value
/// per trial (raw `MeanReward100`, not normalized scores).
pub fn anova_by_environment(
    raw: &ScoreMatrix,
    implementations: &[String],
    alpha: f64,
) -> Result<Vec<AnovaResult>> {
    let columns: Vec<usize> = implementations
        .iter()
        .map(|name| {
            raw.implementation_index(name)
                .ok_or_else(|| Error::UnknownImplementation(name.clone()))
        })
        .collect::<Result<_>>()?;
    raw.strata()
        .iter()
        .enumerate()
        .map(|(m, env)| {
            let groups: Vec<&[f64]> = columns.iter().map(|&k| raw.cell(m, k)).collect();
            let mut result = anova_oneway(env, &groups, alpha)?;
            result.implementations = implementations.to_vec();
            Ok(result)
        })
        .collect()
}

/// JSON has no infinity; an unbounded F is written as the string "inf".
mod extended_f64 {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(D::Error::custom(format!("invalid F statistic {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn all_equal_constants() {
        let g = [0.1, 0.1, 0.1];
        let r = anova_oneway("E", &[&g, &g, &g], 0.05).unwrap();
        assert_eq!((r.f_statistic, r.p_value, r.reject), (0.0, 1.0, false));
    }

    #[test]
    fn equal_means() {
        let g = [1.0, 2.0, 3.0];
        let r = anova_oneway("E", &[&g, &g, &g], 0.05).unwrap();
        assert_eq!((r.f_statistic, r.p_value), (0.0, 1.0));
    }

    #[test]
    fn textbook_fixture() {
        let r = anova_oneway(
            "E",
            &[&[6.0, 8.0, 4.0, 5.0, 3.0, 4.0], &[8.0, 12.0, 9.0, 11.0, 8.0, 7.0], &[13.0, 9.0, 11.0, 8.0, 7.0, 12.0]],
            0.05,
        )
        .unwrap();
        // exact rational F = 3875/377
        assert!((r.f_statistic - 3875.0 / 377.0).abs() < 1e-9);
        assert!((r.p_value - 0.001_544_341_819_957_785_7).abs() < 1e-10);
        assert!(r.reject);
        assert_eq!((r.df_between, r.df_within), (2, 15));
    }

    #[test]
    fn separated_constants_are_infinite() {
        let r = anova_oneway("E", &[&[1.0, 1.0], &[2.0, 2.0]], 0.05).unwrap();
        assert_eq!((r.f_statistic, r.p_value, r.reject), (f64::INFINITY, 0.0, true));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"f_statistic\":\"inf\""));
        let back: AnovaResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn precondition_errors() {
        assert!(anova_oneway("E", &[&[1.0, 2.0]], 0.05).is_err());
        let err = anova_oneway("Pong", &[&[1.0, 2.0], &[3.0]], 0.05).unwrap_err();
        assert!(err.to_string().contains("Pong"));
    }

    proptest! {
        #[test]
        fn scale_invariant(
            groups in prop::collection::vec(prop::collection::vec(-100.0..100.0f64, 2..6), 2..5),
            scale in 0.01..100.0f64,
        ) {
            let refs: Vec<&[f64]> = groups.iter().map(Vec::as_slice).collect();
            let scaled: Vec<Vec<f64>> = groups.iter().map(|g| g.iter().map(|v| v * scale).collect()).collect();
            let scaled_refs: Vec<&[f64]> = scaled.iter().map(Vec::as_slice).collect();
            let a = anova_oneway("E", &refs, 0.05).unwrap().f_statistic;
            let b = anova_oneway("E", &scaled_refs, 0.05).unwrap().f_statistic;
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{} vs {}", a, b);
        }
    }
}
