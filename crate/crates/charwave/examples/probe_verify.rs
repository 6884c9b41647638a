use charwave::asymptotics::{verify_theorem};
use charwave::geometry::{CharacteristicLine, DirectionPair, Dims, MultiIndex};
use charwave::propagator::EvalOptions;
use charwave::quad::AdaptiveOptions;
use charwave::spectral::SpectralProfile;
use std::time::Instant;

fn main() {
    let dims = Dims::new(1, 1).unwrap();
    let profile = SpectralProfile::bump(dims, (1.0, 2.0), 0.75, false).unwrap();
    let dir = DirectionPair::from_angles(&[0.25], &[0.55], dims).unwrap();
    let line = CharacteristicLine::new(vec![0.3, 0.4], vec![-0.3, -0.2], dir).unwrap();
    let taus = [5.0, 10.0, 20.0, 40.0, 80.0];
    let eval_opts = EvalOptions {
        quad: AdaptiveOptions { abs_tol: 1e-11, ..Default::default() },
        max_beta_order: 4,
    };
    let coeff_opts = AdaptiveOptions { abs_tol: 1e-13, ..Default::default() };

    for beta_v in [vec![0,0,0,0], vec![0,1,0,0]] {
        let beta = MultiIndex::new(beta_v.clone(), dims).unwrap();
        let t0 = Instant::now();
        let report = verify_theorem(&profile, &line, &beta, &taus, &eval_opts, &coeff_opts).unwrap();
        println!("beta {:?}: |F| = {:.6e} (quad err {:.1e}), elapsed {:.1?}",
            beta_v, report.coefficient.value.norm(), report.coefficient.quad_error, t0.elapsed());
        for r in &report.rows {
            println!("  tau {:6.1}: |u| {:.6e}  |lead| {:.6e}  err {:.6e}  (prop est {:.1e})",
                r.tau, r.abs_u, r.abs_leading, r.err, r.propagator_est_error);
        }
        println!("  remainder slope {:.4} (residual {:.2e}); leading slope {:?}",
            report.remainder_fit.slope, report.remainder_fit.residual,
            report.leading_fit.as_ref().map(|f| f.slope));
    }
}
