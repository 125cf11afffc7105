//! Built-in quick corpus run by `hyperrigid selftest`.
//!
//! Each check is a reduced, seeded version of one acceptance criterion; the
//! full-size runs live in the `acceptance` test target.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli::{self, AnalyzeOptions, InputDocument};
use crate::cstar::MultiMatrixAlgebra;
use crate::correspondence::Correspondence;
use crate::graph::{Multigraph, Multiplicity};
use crate::hilbmod;
use crate::matcore::{self, Tol};
use crate::repcert;
use crate::sample::{self, ActionKind};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {}: {}", self.name, self.detail)
    }
}

const SEED: u64 = 2024;

fn check(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> Check {
    match f() {
        Ok(detail) => Check { name, passed: true, detail },
        Err(detail) => Check { name, passed: false, detail },
    }
}

fn e(x: impl std::fmt::Display) -> String {
    x.to_string()
}

pub fn run() -> Vec<Check> {
    let tol = Tol::DEFAULT;
    vec![
        check("verdict/certificate agreement", || {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            let mut count = 0;
            for kind in ActionKind::ALL {
                for _ in 0..20 {
                    let c = sample::random_correspondence(&mut rng, kind);
                    let v = c.is_hyperrigid(tol);
                    let r = repcert::certificate(&c, 2, 4, tol).map_err(e)?;
                    let ok = v.hyperrigid == r.verdict && if v.hyperrigid { r.defect <= 1e-10 } else { r.defect >= 0.1 };
                    if !ok || v.hyperrigid != (kind == ActionKind::Unital) {
                        return Err(format!("{kind:?} case: structural {} vs defect {:.3e}", v.hyperrigid, r.defect));
                    }
                    count += 1;
                }
            }
            Ok(format!("{count} correspondences agree"))
        }),
        check("degenerate witness", || {
            let a = MultiMatrixAlgebra::new(vec![1]).map_err(e)?;
            let c = Correspondence::from_multiplicities(&a, &[2], &[vec![1]]).map_err(e)?;
            if c.is_hyperrigid(tol).hyperrigid {
                return Err("reported hyperrigid".into());
            }
            let r = repcert::certificate(&c, 2, 4, tol).map_err(e)?;
            let p = r.pairs.iter().find(|p| p.x == [0, 1, 0] && p.y == [0, 1, 0]).ok_or("missing pair")?;
            if (p.defect - 1.0).abs() > 1e-10 {
                return Err(format!("defect at (e2, e2) is {}", p.defect));
            }
            Ok(format!("defect at (e2, e2) = {:.12}", p.defect))
        }),
        check("frames and approximate units", || {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let (module, gens) = sample::random_generated_module(&mut rng);
                let f = hilbmod::frame(&module, &gens, tol).map_err(e)?;
                worst = worst.max(f.identity_residual().map_err(e)?);
                for _ in 0..10 {
                    let x = sample::random_element(&mut rng, &module);
                    worst = worst.max(f.reconstruct(&x).map_err(e)?.try_sub(&x).map_err(e)?.max_abs());
                }
                if !f.is_empty() {
                    let u = hilbmod::approximate_unit(&f, f.len()).map_err(e)?;
                    for _ in 0..5 {
                        let t = sample::random_operator(&mut rng, &module);
                        worst = worst.max(u.compose(&t).map_err(e)?.try_sub(&t).map_err(e)?.norm());
                    }
                }
            }
            if worst > 1e-10 {
                return Err(format!("residual {worst:.3e}"));
            }
            Ok(format!("max residual {worst:.3e}"))
        }),
        check("graph criterion", || {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
            let mut graphs = Vec::new();
            for n in 1..=4 {
                let mut g = Multigraph::new();
                for k in 0..n {
                    g.set_edges(format!("v{k}"), format!("v{}", (k + 1) % n), Multiplicity::Finite(1));
                }
                graphs.push(g);
            }
            for _ in 0..5 {
                let n = rng.gen_range(1..=4);
                graphs.push(sample::random_multigraph(&mut rng, n, 3));
            }
            for g in &graphs {
                let gc = g.graph_correspondence().map_err(e)?;
                if !g.is_hyperrigid().hyperrigid || !gc.correspondence.is_hyperrigid(tol).hyperrigid {
                    return Err("finite graph not hyperrigid on both paths".into());
                }
            }
            let mut inf = Multigraph::new();
            inf.set_edges("u", "v", Multiplicity::Infinite);
            if inf.is_hyperrigid().hyperrigid {
                return Err("infinite receiver reported hyperrigid".into());
            }
            for cap in 1..=4 {
                let t = inf.truncate(cap).map_err(e)?.graph_correspondence().map_err(e)?;
                if !t.correspondence.is_hyperrigid(tol).hyperrigid {
                    return Err(format!("truncation at {cap} not hyperrigid"));
                }
            }
            Ok(format!("{} finite graphs, 4 truncations", graphs.len()))
        }),
        check("Schwarz machinery", || {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
            for _ in 0..30 {
                let d = rng.gen_range(1..=3);
                let r = rng.gen_range(1..=3);
                let m = rng.gen_range(1..=d * r);
                let phi = sample::random_stinespring(&mut rng, d, r, m);
                let a = sample::random_matrix(&mut rng, d, d);
                let s = repcert::schwarz_defect(&phi, &a, &a).map_err(e)?;
                if !matcore::is_psd(&s, Tol::new(1e-10).map_err(e)?).map_err(e)? {
                    return Err("Schwarz defect not positive".into());
                }
                let (p, q) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
                let ar = sample::random_matrix(&mut rng, p, q);
                let br = sample::random_matrix(&mut rng, p, q);
                let mut mb = sample::random_hermitian(&mut rng, 2 * p);
                if rng.gen_bool(0.5) {
                    let c = matcore::vstack(&[ar.clone(), br.clone()], q).map_err(e)?;
                    mb = &c * c.adjoint() + &mb * mb.adjoint();
                }
                if !repcert::block_positivity(&ar, &br, &mb, tol).map_err(e)?.agree() {
                    return Err("block positivity paths disagree".into());
                }
                let k = rng.gen_range(1..=3);
                let xs: Vec<_> = (0..k).map(|_| sample::random_matrix(&mut rng, d, d)).collect();
                let ys: Vec<_> = (0..k).map(|_| sample::random_matrix(&mut rng, d, d)).collect();
                let mut corner = matcore::zeros(m, m);
                let mut prod = matcore::zeros(d, d);
                for x in &xs {
                    prod += x * x.adjoint();
                    corner += phi.apply(x).map_err(e)? * phi.apply(x).map_err(e)?.adjoint();
                }
                let eps = matcore::op_norm(&(phi.apply(&prod).map_err(e)? - corner));
                if !repcert::epsilon_bound_check(&phi, &xs, &ys, eps, tol).map_err(e)?.holds {
                    return Err("epsilon bound violated".into());
                }
            }
            Ok("30 instances".into())
        }),
        check("Toeplitz identities", || {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
            let (mut module_res, mut below, mut top) = (0.0f64, 0.0f64, 0.0f64);
            for _ in 0..10 {
                let c = sample::random_correspondence(&mut rng, ActionKind::Unital);
                let rep = repcert::fock_rep(&c, 2, tol).map_err(e)?;
                let a = sample::random_algebra_element(&mut rng, c.algebra());
                let x = sample::random_element(&mut rng, c.module());
                let y = sample::random_element(&mut rng, c.module());
                module_res = module_res.max(rep.module_identity_residual(&a, &x).map_err(e)?);
                let (b, t) = rep.inner_identity_residuals(&x, &y).map_err(e)?;
                below = below.max(b);
                top = top.max(t);
            }
            if module_res > 1e-12 || below > 1e-10 {
                return Err(format!("residuals {module_res:.3e}, {below:.3e}"));
            }
            Ok(format!("module {module_res:.1e}, inner below top {below:.1e}, top {top:.2}"))
        }),
        check("document grammar", || {
            let cases: [(&str, bool); 3] = [
                ("algebra 1\nmodule 2\nlambda 1 1 1\n", false),
                ("vertex v\nedge v v inf\n", false),
                ("algebra 2 1\nmodule 2 1\nlambda 1 1 1\nlambda 2 2 1\n", true),
            ];
            for (text, expected) in cases {
                let doc = cli::parse(text).map_err(e)?;
                let opts = AnalyzeOptions { certify: matches!(doc, InputDocument::AlgebraCorrespondence(_)), ..Default::default() };
                let r1 = cli::run_analyze(&doc, &opts).map_err(e)?;
                let r2 = cli::run_analyze(&cli::parse(&cli::serialize(&doc)).map_err(e)?, &opts).map_err(e)?;
                if r1.verdict.hyperrigid != expected || r1.cross_check_failed() || r1.to_json() != r2.to_json() {
                    return Err(format!("unexpected report for {text:?}"));
                }
            }
            if cli::parse("").is_ok() {
                return Err("empty document accepted".into());
            }
            Ok("3 documents".into())
        }),
    ]
}
