use gtasep::bethe::{cgf_parametric, cumulants_from_series, ground_state_at_gamma, series_coeffs};
use gtasep::oracle::{cumulants_fd, log_lambda, JumpResolvedChain, DEFAULT_STATE_CAP};
use gtasep::scalar::ratio;
use gtasep::{ExactParams, Scalar};

fn grid() -> Vec<ExactParams> {
    [(1, 2, 0, 1), (1, 2, 1, 2), (1, 2, 9, 10), (1, 5, 1, 10), (4, 5, 19, 20)]
        .iter()
        .map(|&(a, b, c, d)| ExactParams::new(ratio(a, b), ratio(c, d)).unwrap())
        .collect()
}

#[test]
fn series_matches_oracle_inside_radius() {
    for q in grid() {
        let s = series_coeffs(3, 3, &q, 16).unwrap();
        let chain = JumpResolvedChain::build(3, 3, &q.to_f64(), DEFAULT_STATE_CAP).unwrap();
        for b in [-2e-3, -1e-3, -1e-4, 1e-4, 1e-3, 2e-3] {
            let pt = cgf_parametric(&s, b).unwrap();
            let o = log_lambda(&chain, pt.gamma).unwrap();
            assert!((pt.ln_lambda - o).abs() < 1e-8, "B={b}: {} vs {o}", pt.ln_lambda);
        }
    }
}

#[test]
fn ground_state_matches_oracle_on_gamma_window() {
    for q in grid() {
        let qf = q.to_f64();
        let chain = JumpResolvedChain::build(3, 3, &qf, DEFAULT_STATE_CAP).unwrap();
        for i in -10..=10 {
            let g = 0.02 * i as f64;
            let gs = ground_state_at_gamma(3, 3, &qf, g).unwrap();
            let o = log_lambda(&chain, g).unwrap();
            assert!((gs.ln_lambda - o).abs() < 1e-8, "gamma={g}: {} vs {o}", gs.ln_lambda);
        }
    }
}

#[test]
fn higher_cumulants_match_finite_differences() {
    for q in grid() {
        let s = series_coeffs(3, 3, &q, 6).unwrap();
        let c = cumulants_from_series(&s, 4).unwrap();
        let fd = cumulants_fd(3, 3, &q.to_f64(), 4).unwrap();
        for k in 0..4 {
            let exact = c[k].to_f64_lossy();
            assert!((exact - fd.values[k]).abs() < 1e-6, "c_{}: {exact} vs {}", k + 1, fd.values[k]);
        }
    }
}
