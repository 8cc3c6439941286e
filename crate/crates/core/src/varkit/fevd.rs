//! Moving-average expansion of a VAR and the Cholesky-orthogonalized
//! forecast-error variance decomposition.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::table::{Cell, Table};

use super::VarModel;

/// Moving-average coefficient matrices `B_0..B_h`: `B_0 = I` and
/// `B_i = sum_{j=1}^{min(p,i)} A_j B_{i-j}`. `B_i` maps an innovation `i`
/// periods back into today's level.
pub fn vma_coefficients(model: &VarModel, horizon: usize) -> Vec<DMatrix<f64>> {
    let k = model.k;
    let mut b: Vec<DMatrix<f64>> = Vec::with_capacity(horizon + 1);
    b.push(DMatrix::identity(k, k));
    for i in 1..=horizon {
        let mut bi = DMatrix::zeros(k, k);
        for j in 1..=model.p.min(i) {
            bi += &model.coefs[j - 1] * &b[i - j];
        }
        b.push(bi);
    }
    b
}

/// Lower-triangular Cholesky factor with positive diagonal, `P P' = omega`.
/// Fails citing the first non-positive pivot.
pub fn cholesky_factor(omega: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = omega.nrows();
    if omega.ncols() != k {
        return Err(Error::InvalidArg("covariance matrix must be square".into()));
    }
    let scale = (0..k).map(|i| omega[(i, i)].abs()).fold(0.0f64, f64::max);
    let mut l = DMatrix::zeros(k, k);
    for j in 0..k {
        let mut d = omega[(j, j)];
        for m in 0..j {
            d -= l[(j, m)] * l[(j, m)];
        }
        if d <= 1e-12 * scale.max(1.0) {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        l[(j, j)] = d.sqrt();
        for i in j + 1..k {
            let mut s = omega[(i, j)];
            for m in 0..j {
                s -= l[(i, m)] * l[(j, m)];
            }
            l[(i, j)] = s / l[(j, j)];
        }
    }
    Ok(l)
}

/// Forecast-error variance decomposition of one variable: per horizon the
/// forecast standard error and the percentage contribution of each
/// orthogonalized shock, in the model's variable (Cholesky) ordering.
#[derive(Debug, Clone, Serialize)]
pub struct FevdTable {
    pub target: String,
    pub ordering: Vec<String>,
    pub horizons: usize,
    /// Forecast standard error at horizons `1..=horizons`.
    pub se: Vec<f64>,
    /// `shares[h-1][j]`: percent of the horizon-h forecast-error variance of
    /// the target attributed to shock `j`. Rows sum to 100.
    pub shares: Vec<Vec<f64>>,
}

/// Decomposes the h-step forecast-error variance of `target` into the
/// orthogonalized innovations `Theta_i = B_i P`:
/// `MSE(h) = sum_{i<h} sum_j Theta_i(target,j)^2`, share of shock `j`
/// `= 100 sum_{i<h} Theta_i(target,j)^2 / MSE(h)`.
pub fn fevd(model: &VarModel, target: &str, horizons: usize) -> Result<FevdTable> {
    if horizons == 0 {
        return Err(Error::InvalidArg("horizons must be >= 1".into()));
    }
    let idx = model
        .names
        .iter()
        .position(|n| n == target)
        .ok_or_else(|| Error::UnknownSeries(target.to_string()))?;
    let k = model.k;
    let p = cholesky_factor(&model.omega)?;
    let b = vma_coefficients(model, horizons - 1);

    let mut cumulative = vec![0.0f64; k];
    let mut se = Vec::with_capacity(horizons);
    let mut shares = Vec::with_capacity(horizons);
    for h in 1..=horizons {
        let theta = &b[h - 1] * &p;
        for j in 0..k {
            cumulative[j] += theta[(idx, j)] * theta[(idx, j)];
        }
        let mse: f64 = cumulative.iter().sum();
        if mse <= 0.0 {
            return Err(Error::Numerical(format!(
                "zero forecast-error variance for {target} at horizon {h}"
            )));
        }
        se.push(mse.sqrt());
        shares.push(cumulative.iter().map(|c| 100.0 * c / mse).collect());
    }
    Ok(FevdTable {
        target: target.to_string(),
        ordering: model.names.clone(),
        horizons,
        se,
        shares,
    })
}

/// Table 5.1-style rendering: Période | S.E. | one column per variable,
/// with the Cholesky ordering footer.
pub fn fevd_table(f: &FevdTable) -> Table {
    let mut columns = vec!["Période".to_string(), "S.E.".to_string()];
    columns.extend(f.ordering.iter().cloned());
    let mut t = Table::new(columns)
        .with_title(format!("Décomposition de la variance de {}", f.target));
    for h in 0..f.horizons {
        let mut row = vec![Cell::Int(h as i64 + 1), Cell::Num(f.se[h])];
        row.extend(f.shares[h].iter().map(|&s| Cell::Num(s)));
        t.push_row(row);
    }
    t.push_note(format!("Cholesky Ordering: {}", f.ordering.join(" ")));
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varkit::{matrix_to_dataset, random_stable_var, simulate_var, var_estimate};
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("v{i}")).collect()
    }

    fn model_with(
        coefs: Vec<DMatrix<f64>>,
        omega: DMatrix<f64>,
        seed: u64,
        n: usize,
    ) -> VarModel {
        let k = omega.nrows();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chol = cholesky_factor(&omega).unwrap();
        let p = coefs.len().max(1);
        let data = simulate_var(&DVector::zeros(k), &coefs, &chol, n, 50, &mut rng);
        let d = matrix_to_dataset(&data, &names(k)).unwrap();
        let mut model = var_estimate(&d, p).unwrap();
        // Substitute the exact parameters so identities are exact.
        model.coefs = if coefs.is_empty() {
            vec![DMatrix::zeros(k, k)]
        } else {
            coefs
        };
        model.omega = omega;
        model
    }

    #[test]
    fn vma_starts_at_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let (_, coefs, omega) = random_stable_var(3, 2, 0.7, &mut rng);
        let model = model_with(coefs, omega, 10, 200);
        let b = vma_coefficients(&model, 5);
        assert_eq!(b[0], DMatrix::identity(3, 3));
    }

    #[test]
    fn var1_vma_is_matrix_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (_, coefs, omega) = random_stable_var(3, 1, 0.8, &mut rng);
        let a1 = coefs[0].clone();
        let model = model_with(coefs, omega, 11, 200);
        let b = vma_coefficients(&model, 5);
        let mut power = DMatrix::identity(3, 3);
        for bi in b.iter().take(6).skip(1) {
            power = &a1 * power;
            for r in 0..3 {
                for c in 0..3 {
                    assert!((bi[(r, c)] - power[(r, c)]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn vma_matches_impulse_simulation() {
        // Oracle: the VAR is linear, so (shocked path - baseline path) with
        // shared innovations equals the moving-average weight exactly;
        // average a handful of noisy replications to use the simulator as an
        // independent route.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (_, coefs, omega) = random_stable_var(2, 2, 0.7, &mut rng);
        let model = model_with(coefs.clone(), omega, 12, 200);
        let b = vma_coefficients(&model, 6);

        let k = 2;
        let reps = 200;
        let horizon = 6;
        for shock_var in 0..k {
            let mut acc = vec![DVector::<f64>::zeros(k); horizon + 1];
            for rep in 0..reps {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 + rep);
                let noise: Vec<DVector<f64>> = (0..horizon + 1)
                    .map(|_| {
                        DVector::from_fn(k, |_, _| {
                            rng.sample::<f64, _>(rand_distr::StandardNormal)
                        })
                    })
                    .collect();
                let run = |impulse: f64| -> Vec<DVector<f64>> {
                    let mut hist = vec![DVector::<f64>::zeros(k); 2];
                    let mut path = Vec::new();
                    for (t, eps) in noise.iter().enumerate() {
                        let mut y = eps.clone();
                        if t == 0 {
                            y[shock_var] += impulse;
                        }
                        for (j, a) in coefs.iter().enumerate() {
                            y += a * &hist[j];
                        }
                        path.push(y.clone());
                        hist.rotate_right(1);
                        hist[0] = y;
                    }
                    path
                };
                let shocked = run(1.0);
                let base = run(0.0);
                for t in 0..=horizon {
                    acc[t] += &shocked[t] - &base[t];
                }
            }
            for (t, total) in acc.iter().enumerate() {
                let avg = total / reps as f64;
                for r in 0..k {
                    assert!(
                        (avg[r] - b[t][(r, shock_var)]).abs() < 1e-10,
                        "impulse response mismatch at t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn vma_decays_for_stable_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let (_, coefs, omega) = random_stable_var(3, 2, 0.9, &mut rng);
        let model = model_with(coefs, omega, 13, 200);
        let b = vma_coefficients(&model, 50);
        let norm = |m: &DMatrix<f64>| m.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm(&b[50]) < norm(&b[1]));
    }

    #[test]
    fn cholesky_identity_and_diagonal() {
        let i3 = DMatrix::identity(3, 3);
        assert_eq!(cholesky_factor(&i3).unwrap(), i3);
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&[4.0, 9.0]));
        let p = cholesky_factor(&d).unwrap();
        assert_eq!(p[(0, 0)], 2.0);
        assert_eq!(p[(1, 1)], 3.0);
        assert_eq!(p[(0, 1)], 0.0);
    }

    #[test]
    fn cholesky_reconstructs_random_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let m = DMatrix::from_fn(7, 7, |_, _| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        let omega = &m * m.transpose() + DMatrix::identity(7, 7) * 0.5;
        let p = cholesky_factor(&omega).unwrap();
        let back = &p * p.transpose();
        for r in 0..7 {
            for c in 0..7 {
                assert!((back[(r, c)] - omega[(r, c)]).abs() < 1e-10);
            }
            assert!(p[(r, r)] > 0.0);
        }
    }

    #[test]
    fn cholesky_cites_failing_pivot() {
        let mut omega = DMatrix::identity(3, 3);
        omega[(2, 2)] = -1.0;
        match cholesky_factor(&omega) {
            Err(Error::NotPositiveDefinite { pivot }) => assert_eq!(pivot, 2),
            other => panic!("expected pivot error, got {other:?}"),
        }
    }

    #[test]
    fn first_variable_owns_horizon_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let (_, coefs, omega) = random_stable_var(4, 1, 0.6, &mut rng);
        let model = model_with(coefs, omega, 15, 300);
        let f = fevd(&model, "v0", 10).unwrap();
        assert!((f.shares[0][0] - 100.0).abs() < 1e-10);
        for j in 1..4 {
            assert!(f.shares[0][j].abs() < 1e-10);
        }
    }

    #[test]
    fn diagonal_noise_without_dynamics_is_all_own_shock() {
        let omega = DMatrix::from_diagonal(&DVector::from_column_slice(&[2.0, 3.0, 0.5]));
        let model = model_with(vec![DMatrix::zeros(3, 3)], omega, 16, 300);
        for (v, name) in ["v0", "v1", "v2"].iter().enumerate() {
            let f = fevd(&model, name, 8).unwrap();
            for h in 0..8 {
                assert!((f.shares[h][v] - 100.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rows_sum_to_one_hundred_and_se_grows() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (_, coefs, omega) = random_stable_var(5, 2, 0.85, &mut rng);
        let model = model_with(coefs, omega, 17, 400);
        let f = fevd(&model, "v2", 18).unwrap();
        for h in 0..18 {
            let sum: f64 = f.shares[h].iter().sum();
            assert!((sum - 100.0).abs() < 1e-8);
            for &s in &f.shares[h] {
                assert!((0.0..=100.0 + 1e-9).contains(&s));
            }
            if h > 0 {
                assert!(f.se[h] >= f.se[h - 1] - 1e-12);
            }
        }
    }

    #[test]
    fn unknown_target_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let (_, coefs, omega) = random_stable_var(2, 1, 0.5, &mut rng);
        let model = model_with(coefs, omega, 18, 200);
        assert!(matches!(fevd(&model, "nope", 4), Err(Error::UnknownSeries(_))));
    }

    #[test]
    fn renders_cholesky_ordering_footer() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let (_, coefs, omega) = random_stable_var(3, 1, 0.5, &mut rng);
        let model = model_with(coefs, omega, 19, 200);
        let f = fevd(&model, "v1", 3).unwrap();
        let text = fevd_table(&f).to_text(crate::table::Locale::Comma);
        assert!(text.contains("Cholesky Ordering: v0 v1 v2"), "{text}");
        assert!(text.contains("Période"));
    }
}
