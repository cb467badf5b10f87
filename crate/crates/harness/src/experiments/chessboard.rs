use rotor_gibbs::conditioned_model::ConditionedParams;
use rotor_gibbs::gibbs_sampler::{chessboard_check, GibbsModel, InvariantTrigPolynomial, PlaquetteFn};
use rotor_gibbs::rng::stream;
use rotor_gibbs::rotor_model::LatticeShape;

use super::{num, Outcome, Result, Table};
use crate::config::ChessboardConfig;

pub(super) fn run(c: &ChessboardConfig, seed: u64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let shape = LatticeShape::new(2)?;
    let mut rng = stream(seed, 0);
    let mut table = Table::new(&["beta_j", "set", "lhs", "rhs", "holds"]);
    let mut failures = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for &bj in &c.beta_j {
        let p = ConditionedParams::new(bj / c.coupling, c.coupling, c.t)?;
        let model = GibbsModel::conditioned(shape, &p)?;
        for set in 0..c.sets {
            let polys: Vec<InvariantTrigPolynomial> =
                (0..4).map(|_| InvariantTrigPolynomial::random(&mut rng, c.n_terms)).collect();
            let fs: Vec<Box<PlaquetteFn>> =
                polys.into_iter().map(|q| Box::new(move |x: &[f64; 4]| q.eval(x)) as Box<PlaquetteFn>).collect();
            let refs: Vec<&PlaquetteFn> = fs.iter().map(|f| f.as_ref()).collect();
            let r = chessboard_check(&refs, &model, c.n_grid)?;
            let holds = r.lhs <= r.rhs + c.tolerance;
            worst = worst.max(r.lhs - r.rhs);
            table.row([num(bj), set.to_string(), num(r.lhs), num(r.rhs), holds.to_string()]);
            if !holds {
                failures.push(format!("βJ={bj} set {set}"));
            }
        }
    }
    out.file("chessboard.csv", table.finish());
    out.check(
        "chessboard_estimate",
        failures.is_empty(),
        format!("{} sets × {} couplings, max lhs − rhs = {worst:.3e}; failures: {:?}", c.sets, c.beta_j.len(), failures),
    );
    Ok(out)
}
