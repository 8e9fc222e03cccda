//! Catalogue of explicit inequalities with an evaluator that substitutes
//! user-supplied or pipeline-computed parameters and reports verdicts.
//!
//! Rational inputs stay exact through +, −, ×, ÷ and integer powers. Anything
//! transcendental becomes an interval widened by a few ulps per operation,
//! so a verdict is only decided when the comparison is clear.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::complex::SimplicialComplex;
use crate::covers::Cover;
use crate::error::{Error, Result};
use crate::exact::{to_f64, Rational};
use crate::graph::{shortest_path_tree, Graph};
use crate::homology::betti_numbers;
use crate::hyperbolic::{ball_volume, moser_constant};
use crate::scl::FillingCertificate;
use crate::spectra::{charpoly_gap_bound, lambda1_split, SpectralSplit};
use crate::whitney::{empirical_sup_constants, inner_product, norm_equivalence_constants, Geometry};

/// Relative gap below which a comparison is reported as marginal.
pub const MARGINAL: f64 = 1e-9;

const WIDEN: f64 = 4.0 * f64::EPSILON;

#[derive(Clone, Debug, PartialEq)]
pub enum Num {
    Exact(Rational),
    Interval(f64, f64),
}

fn widen(lo: f64, hi: f64) -> Num {
    Num::Interval(lo - lo.abs() * WIDEN - f64::MIN_POSITIVE, hi + hi.abs() * WIDEN + f64::MIN_POSITIVE)
}

impl Num {
    pub fn int(v: i64) -> Num {
        Num::Exact(Rational::from_integer(BigInt::from(v)))
    }

    pub fn float(v: f64) -> Num {
        Num::Interval(v, v)
    }

    /// A float known to relative accuracy `rel`.
    pub fn approx(v: f64, rel: f64) -> Num {
        let e = v.abs() * rel;
        widen(v - e, v + e)
    }

    pub fn pi() -> Num {
        widen(PI, PI)
    }

    pub fn bounds(&self) -> (f64, f64) {
        match self {
            Num::Exact(r) => {
                let v = to_f64(r);
                (v, v)
            }
            Num::Interval(lo, hi) => (*lo, *hi),
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Num::Exact(r) => to_f64(r),
            Num::Interval(lo, hi) => 0.5 * (lo + hi),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Num::Exact(_))
    }

    fn lift(a: &Num, b: &Num, f: impl Fn(f64, f64) -> f64) -> Num {
        let (al, ah) = a.bounds();
        let (bl, bh) = b.bounds();
        let c = [f(al, bl), f(al, bh), f(ah, bl), f(ah, bh)];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        widen(lo, hi)
    }

    pub fn add(&self, o: &Num) -> Num {
        match (self, o) {
            (Num::Exact(a), Num::Exact(b)) => Num::Exact(a + b),
            _ => {
                let (al, ah) = self.bounds();
                let (bl, bh) = o.bounds();
                widen(al + bl, ah + bh)
            }
        }
    }

    pub fn sub(&self, o: &Num) -> Num {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Num {
        match self {
            Num::Exact(a) => Num::Exact(-a),
            Num::Interval(lo, hi) => Num::Interval(-hi, -lo),
        }
    }

    pub fn mul(&self, o: &Num) -> Num {
        match (self, o) {
            (Num::Exact(a), Num::Exact(b)) => Num::Exact(a * b),
            _ => Num::lift(self, o, |x, y| x * y),
        }
    }

    pub fn div(&self, o: &Num) -> Result<Num> {
        match (self, o) {
            (_, Num::Exact(b)) if b.is_zero() => Err(Error::InvalidParameter("division by zero".into())),
            (Num::Exact(a), Num::Exact(b)) => Ok(Num::Exact(a / b)),
            _ => {
                let (bl, bh) = o.bounds();
                if bl <= 0.0 && bh >= 0.0 {
                    return Err(Error::InvalidParameter("division by an interval containing zero".into()));
                }
                Ok(Num::lift(self, o, |x, y| x / y))
            }
        }
    }

    /// Monotone function applied to the endpoints.
    fn monotone(&self, f: impl Fn(f64) -> f64) -> Num {
        let (lo, hi) = self.bounds();
        let (a, b) = (f(lo), f(hi));
        widen(a.min(b), a.max(b))
    }

    pub fn sqrt(&self) -> Result<Num> {
        let (lo, _) = self.bounds();
        if lo < 0.0 {
            return Err(Error::InvalidParameter("square root of a negative quantity".into()));
        }
        if let Num::Exact(r) = self {
            let (n, d) = (r.numer(), r.denom());
            let (sn, sd) = (n.sqrt(), d.sqrt());
            if &sn * &sn == *n && &sd * &sd == *d {
                return Ok(Num::Exact(Rational::new(sn, sd)));
            }
        }
        Ok(self.monotone(f64::sqrt))
    }

    pub fn exp(&self) -> Num {
        self.monotone(f64::exp)
    }

    /// self^e for positive self, exact when `e` is an exact integer.
    pub fn pow(&self, e: &Num) -> Result<Num> {
        if let (Num::Exact(b), Num::Exact(x)) = (self, e) {
            if x.is_integer() {
                let k = x.to_integer().to_i32().ok_or_else(|| Error::InvalidParameter("exponent too large".into()))?;
                if b.is_zero() && k < 0 {
                    return Err(Error::InvalidParameter("zero to a negative power".into()));
                }
                let p = num_traits::pow(b.clone(), k.unsigned_abs() as usize);
                return Ok(Num::Exact(if k < 0 { p.recip() } else { p }));
            }
        }
        let (lo, _) = self.bounds();
        if !(lo > 0.0) {
            return Err(Error::InvalidParameter("non-integer power of a non-positive quantity".into()));
        }
        let (bl, bh) = self.bounds();
        let (el, eh) = e.bounds();
        let c = [bl.powf(el), bl.powf(eh), bh.powf(el), bh.powf(eh)];
        Ok(widen(c.iter().copied().fold(f64::INFINITY, f64::min), c.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
    }

    pub fn min(&self, o: &Num) -> Num {
        match (self, o) {
            (Num::Exact(a), Num::Exact(b)) => Num::Exact(a.min(b).clone()),
            _ => {
                let (al, ah) = self.bounds();
                let (bl, bh) = o.bounds();
                Num::Interval(al.min(bl), ah.min(bh))
            }
        }
    }

    fn render(&self) -> NumReport {
        match self {
            Num::Exact(r) => NumReport { value: to_f64(r), exact: Some(r.to_string()), interval: None },
            Num::Interval(lo, hi) => NumReport { value: self.value(), exact: None, interval: Some([*lo, *hi]) },
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct NumReport {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    User,
    Computed(String),
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::User => write!(f, "user"),
            Provenance::Computed(s) => write!(f, "computed:{s}"),
        }
    }
}

/// Named parameter values with their provenance.
#[derive(Clone, Debug, Default)]
pub struct Params {
    values: BTreeMap<String, (Num, Provenance)>,
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_user(&mut self, name: &str, v: Num) {
        self.values.insert(name.to_string(), (v, Provenance::User));
    }

    /// Inserts a computed value unless the user already supplied one.
    pub fn set_computed(&mut self, name: &str, v: Num, source: &str) {
        self.values.entry(name.to_string()).or_insert((v, Provenance::Computed(source.to_string())));
    }

    pub fn get(&self, name: &str) -> Option<&Num> {
        self.values.get(name).map(|(v, _)| v)
    }

    pub fn provenance(&self, name: &str) -> Option<&Provenance> {
        self.values.get(name).map(|(_, p)| p)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.values.keys()
    }

    fn need(&self, name: &str) -> Result<&Num> {
        self.get(name).ok_or_else(|| Error::MissingParameter(name.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// lhs ≤ rhs
    AtMost,
    /// lhs ≥ rhs
    AtLeast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    Marginal,
    NotApplicable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Marginal => "marginal",
            Verdict::NotApplicable => "not-applicable",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    User,
    /// Filled from the attached complex/cover/geometry when not supplied.
    Computed,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub meaning: &'static str,
    pub source: Source,
}

const fn user(name: &'static str, meaning: &'static str) -> ParamSpec {
    ParamSpec { name, meaning, source: Source::User }
}

const fn computed(name: &'static str, meaning: &'static str) -> ParamSpec {
    ParamSpec { name, meaning, source: Source::Computed }
}

type Eval = fn(&Params) -> Result<Num>;

/// One catalogued inequality `lhs (≤|≥) rhs`.
#[derive(Clone, Copy)]
pub struct BoundEntry {
    pub id: &'static str,
    pub title: &'static str,
    pub formula: &'static str,
    pub relation: Relation,
    /// Parameter holding the left-hand side; the verdict is not-applicable
    /// when it is absent.
    pub lhs: &'static str,
    pub params: &'static [ParamSpec],
    rhs: Eval,
}

impl std::fmt::Debug for BoundEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundEntry").field("id", &self.id).field("formula", &self.formula).finish()
    }
}

fn p<'a>(ps: &'a Params, name: &str) -> Result<&'a Num> {
    ps.need(name)
}

fn half() -> Num {
    Num::Exact(Rational::new(BigInt::one(), BigInt::from(2)))
}

fn c_term(ps: &Params) -> Result<(Num, Num)> {
    let c = p(ps, "C")?.clone();
    Ok((c.mul(&c), c.mul(&half()).mul(&p(ps, "vol")?.sqrt()?)))
}

fn surface_triangles(ps: &Params) -> Result<Num> {
    let mu = p(ps, "mu")?.value();
    let curv = p(ps, "curvature")?.value();
    let small = Num::approx(ball_volume(2, mu / 5.0, 1.0)?, 1e-12);
    let big = Num::approx(ball_volume(2, mu, curv)?, 1e-12);
    p(ps, "area_sigma")?.div(&small)?.mul(&big).div(&small)
}

fn moser(ps: &Params, l: f64, lambda: &Num) -> Result<Num> {
    let n = p(ps, "n")?.value();
    if n.fract() != 0.0 || n < 3.0 {
        return Err(Error::InvalidParameter(format!("n must be an integer ≥ 3, got {n}")));
    }
    let m = moser_constant(n as usize, 1, l, lambda.value())?;
    let err = m.tail_bound / m.value + 1e-12;
    Ok(Num::approx(m.value, err))
}

static CATALOGUE: &[BoundEntry] = &[
    BoundEntry {
        id: "upper_b0",
        title: "upper bound on 1/sqrt(lambda) via stable area, b1 = 0",
        formula: "1/sqrt(lambda) <= C^2 (2 pi V + D * sarea_ratio) + (C/2) sqrt(vol)",
        relation: Relation::AtMost,
        lhs: "inv_sqrt_lambda",
        params: &[
            computed("inv_sqrt_lambda", "1/sqrt(lambda_1^1 coexact)"),
            user("C", "Sobolev constant C(lambda)"),
            user("V", "boundary volume of the fundamental domain"),
            user("D", "maximal face-pairing length"),
            user("sarea_ratio", "sup of sArea(gamma)/length(gamma) over length <= D"),
            computed("vol", "volume of M"),
        ],
        rhs: |ps| {
            let (c2, tail) = c_term(ps)?;
            let two_pi_v = Num::int(2).mul(&Num::pi()).mul(p(ps, "V")?);
            Ok(c2.mul(&two_pi_v.add(&p(ps, "D")?.mul(p(ps, "sarea_ratio")?))).add(&tail))
        },
    },
    BoundEntry {
        id: "upper_b0_body",
        title: "upper bound on 1/sqrt(lambda) via boundary volume and periods",
        formula: "1/sqrt(lambda) <= C^2 (3 pi vol_dF + sarea_sup) + (C/2) sqrt(vol)",
        relation: Relation::AtMost,
        lhs: "inv_sqrt_lambda",
        params: &[
            computed("inv_sqrt_lambda", "1/sqrt(lambda_1^1 coexact)"),
            user("C", "Sobolev constant C(lambda)"),
            user("vol_dF", "boundary volume of the fundamental domain"),
            user("sarea_sup", "sup_j sArea(gamma_j)"),
            computed("vol", "volume of M"),
        ],
        rhs: |ps| {
            let (c2, tail) = c_term(ps)?;
            let inner = Num::int(3).mul(&Num::pi()).mul(p(ps, "vol_dF")?).add(p(ps, "sarea_sup")?);
            Ok(c2.mul(&inner).add(&tail))
        },
    },
    BoundEntry {
        id: "upper_b1",
        title: "upper bound on (1-E)/sqrt(lambda) when b1 = 1",
        formula: "(1-E)/sqrt(lambda) <= C^2 (3 pi V + 2 sqrt2 D^2 vol^(delta+1/2) sarea_ratio + 5 pi) + (C/2) sqrt(vol)",
        relation: Relation::AtMost,
        lhs: "damped_inv_sqrt_lambda",
        params: &[
            user("damped_inv_sqrt_lambda", "(1-E)/sqrt(lambda_1^1 coexact)"),
            user("C", "Sobolev constant C(lambda)"),
            user("V", "boundary volume of the fundamental domain"),
            user("D", "maximal face-pairing length"),
            user("delta", "exponent slack delta > 0"),
            user("sarea_ratio", "sup of sArea/length over null-homologous loops"),
            computed("vol", "volume of M"),
        ],
        rhs: regulator_rhs,
    },
    BoundEntry {
        id: "upper_general",
        title: "upper bound on 1/sqrt(lambda) with harmonic damping, b1 > 0",
        formula: "1/sqrt(lambda) <= 3 pi C^2 V + (C/2) sqrt(vol) + C^2 |f|/sqrt(|f|^2+|h|^2) (sarea_sup + (5 b1 + 2) pi)",
        relation: Relation::AtMost,
        lhs: "inv_sqrt_lambda",
        params: &[
            computed("inv_sqrt_lambda", "1/sqrt(lambda_1^1 coexact)"),
            user("C", "Sobolev constant C(lambda)"),
            user("V", "boundary volume of the fundamental domain"),
            user("f_norm", "L2 norm of the eigenform f"),
            user("h_norm", "L2 norm of the harmonic form h"),
            user("sarea_sup", "sup of sArea of corrected loops of length <= D"),
            computed("b1", "first Betti number"),
            computed("vol", "volume of M"),
        ],
        rhs: |ps| {
            let (c2, tail) = c_term(ps)?;
            let f = p(ps, "f_norm")?;
            let h = p(ps, "h_norm")?;
            let damp = f.div(&f.mul(f).add(&h.mul(h)).sqrt()?)?;
            let periods = p(ps, "sarea_sup")?.add(&Num::int(5).mul(p(ps, "b1")?).add(&Num::int(2)).mul(&Num::pi()));
            let main = Num::int(3).mul(&Num::pi()).mul(&c2).mul(p(ps, "V")?);
            Ok(main.add(&tail).add(&c2.mul(&damp).mul(&periods)))
        },
    },
    BoundEntry {
        id: "harmonic_subtraction",
        title: "period of f - h along a loop",
        formula: "|period(f-h)| <= df_sup (sarea + 5 b1 pi)",
        relation: Relation::AtMost,
        lhs: "period",
        params: &[
            user("period", "|integral of f - h along the loop|"),
            user("df_sup", "sup norm of df"),
            user("sarea", "stable area of the corrected loop"),
            computed("b1", "first Betti number"),
        ],
        rhs: |ps| {
            let inner = p(ps, "sarea")?.add(&Num::int(5).mul(p(ps, "b1")?).mul(&Num::pi()));
            Ok(p(ps, "df_sup")?.mul(&inner))
        },
    },
    BoundEntry {
        id: "lower_whitney",
        title: "scl/length controlled by the Whitney coexact gap",
        formula: "(scl/length)^2 <= W vol diam^2 / lambda_w",
        relation: Relation::AtMost,
        lhs: "scl_ratio_sq",
        params: &[
            user("scl_ratio_sq", "(scl(gamma)/length(gamma))^2"),
            user("W", "constant W_{M0}"),
            computed("vol", "volume of M"),
            computed("diam", "diameter of M"),
            computed("lambda_w", "Whitney lambda_1^1 coexact"),
        ],
        rhs: |ps| {
            let d = p(ps, "diam")?;
            p(ps, "W")?.mul(p(ps, "vol")?).mul(&d.mul(d)).div(p(ps, "lambda_w")?)
        },
    },
    BoundEntry {
        id: "dichotomy",
        title: "comparison of smooth and Whitney coexact gaps (second alternative)",
        formula: "lambda <= 4 G_M0^2 vol lambda_w, unless lambda_w >= 1/(4 G_M0^2 C_M0^2 vol)",
        relation: Relation::AtMost,
        lhs: "lambda",
        params: &[
            computed("lambda", "lambda_1^1 coexact (combinatorial stand-in)"),
            user("G_M0", "constant G_{M0}"),
            user("C_M0", "constant C_{M0}"),
            computed("vol", "volume of M"),
            computed("lambda_w", "Whitney lambda_1^1 coexact"),
        ],
        rhs: |ps| {
            let g = p(ps, "G_M0")?;
            Ok(Num::int(4).mul(g).mul(g).mul(p(ps, "vol")?).mul(p(ps, "lambda_w")?))
        },
    },
    BoundEntry {
        id: "tree_area",
        title: "boundary volume of a tree-type fundamental domain",
        formula: "vol(dF_T) <= vol(dF_0) * vol(M)/vol(M_0)",
        relation: Relation::AtMost,
        lhs: "vol_dFT",
        params: &[
            user("vol_dFT", "boundary volume of F_T"),
            user("vol_dF0", "boundary volume of F_0"),
            computed("vol_ratio", "vol(M)/vol(M_0), the cover degree"),
        ],
        rhs: |ps| Ok(p(ps, "vol_dF0")?.mul(p(ps, "vol_ratio")?)),
    },
    BoundEntry {
        id: "tree_diam",
        title: "diameter of a tree-type fundamental domain",
        formula: "diam(F_T) <= diam(F_0) (diam(T) + 1)",
        relation: Relation::AtMost,
        lhs: "diam_FT",
        params: &[
            user("diam_FT", "diameter of F_T"),
            user("diam_F0", "diameter of F_0"),
            computed("diam_T", "diameter of the spanning tree"),
        ],
        rhs: |ps| Ok(p(ps, "diam_F0")?.mul(&p(ps, "diam_T")?.add(&Num::int(1)))),
    },
    BoundEntry {
        id: "comb_ball_diam",
        title: "tile-graph distance versus distance in M",
        formula: "d_G(w1,w2) <= d(p,q)/r0 * 2 k0 + 2 k0",
        relation: Relation::AtMost,
        lhs: "graph_dist",
        params: &[
            user("graph_dist", "distance in the tile adjacency graph"),
            user("dist", "distance d(p,q) in M"),
            user("r0", "distance from F_0 to its combinatorial unit sphere"),
            computed("k0", "tiles in a combinatorial unit ball"),
        ],
        rhs: |ps| {
            let two_k0 = Num::int(2).mul(p(ps, "k0")?);
            Ok(p(ps, "dist")?.div(p(ps, "r0")?)?.mul(&two_k0).add(&two_k0))
        },
    },
    BoundEntry {
        id: "tree_diam_M",
        title: "diameter of a tree-type domain in terms of diam(M)",
        formula: "diam(F_T) <= diam(F_0) (4 k0/r0 diam(M) + 4 k0 + 1)",
        relation: Relation::AtMost,
        lhs: "diam_FT",
        params: &[
            user("diam_FT", "diameter of F_T"),
            user("diam_F0", "diameter of F_0"),
            user("r0", "distance from F_0 to its combinatorial unit sphere"),
            computed("k0", "tiles in a combinatorial unit ball"),
            computed("diam", "diameter of M"),
        ],
        rhs: |ps| {
            let four_k0 = Num::int(4).mul(p(ps, "k0")?);
            let inner = four_k0.div(p(ps, "r0")?)?.mul(p(ps, "diam")?).add(&four_k0).add(&Num::int(1));
            Ok(p(ps, "diam_F0")?.mul(&inner))
        },
    },
    BoundEntry {
        id: "dirichlet_diam",
        title: "diameter of a Dirichlet domain",
        formula: "diam(F) <= 2 diam(M)",
        relation: Relation::AtMost,
        lhs: "diam_F",
        params: &[user("diam_F", "diameter of the Dirichlet domain"), computed("diam", "diameter of M")],
        rhs: |ps| Ok(Num::int(2).mul(p(ps, "diam")?)),
    },
    BoundEntry {
        id: "dirichlet_boundary",
        title: "boundary volume of a Dirichlet domain",
        formula: "vol(dF) <= E_n exp((2n-3) 4 diam(M))",
        relation: Relation::AtMost,
        lhs: "vol_dF",
        params: &[
            user("vol_dF", "boundary volume of the Dirichlet domain"),
            user("E_n", "dimensional constant E_n"),
            computed("n", "dimension"),
            computed("diam", "diameter of M"),
        ],
        rhs: |ps| {
            let e = Num::int(2).mul(p(ps, "n")?).sub(&Num::int(3)).mul(&Num::int(4)).mul(p(ps, "diam")?);
            Ok(p(ps, "E_n")?.mul(&e.exp()))
        },
    },
    BoundEntry {
        id: "surface_injectivity",
        title: "injectivity radius of a bounded-curvature surface",
        formula: "inj(S) >= min(1/(2 mu1), inj(M))",
        relation: Relation::AtLeast,
        lhs: "inj_S",
        params: &[
            user("inj_S", "injectivity radius of the surface"),
            user("mu1", "curvature constant mu_1"),
            user("inj", "injectivity radius of M"),
        ],
        rhs: |ps| Ok(Num::int(1).div(&Num::int(2).mul(p(ps, "mu1")?))?.min(p(ps, "inj")?)),
    },
    BoundEntry {
        id: "surface_triangulation_count",
        title: "number of triangles in a bounded-geometry triangulation",
        formula: "triangles <= area / V_{mu/5}(-1) * V_mu(-curvature) / V_{mu/5}(-1)",
        relation: Relation::AtMost,
        lhs: "triangles",
        params: &[
            user("triangles", "number of triangles"),
            user("area_sigma", "area of the surface"),
            user("mu", "scale mu_M"),
            user("curvature", "curvature bound C (space form of curvature -C)"),
        ],
        rhs: surface_triangles,
    },
    BoundEntry {
        id: "intersection_bound",
        title: "intersections of a surface with a closed geodesic",
        formula: "#(S cap gamma) <= triangles_bound * length / (6 mu / 5)",
        relation: Relation::AtMost,
        lhs: "intersections",
        params: &[
            user("intersections", "number of intersection points"),
            user("area_sigma", "area of the surface"),
            user("mu", "scale mu_M"),
            user("curvature", "curvature bound C"),
            user("length", "length of gamma"),
        ],
        rhs: |ps| {
            let scale = Num::int(6).mul(p(ps, "mu")?).div(&Num::int(5))?;
            surface_triangles(ps)?.mul(p(ps, "length")?).div(&scale)
        },
    },
    BoundEntry {
        id: "free_part_length",
        title: "length of a loop with prescribed free homology part",
        formula: "length(gamma0) <= (A D sqrt(b1))^b1 D b1",
        relation: Relation::AtMost,
        lhs: "length_gamma0",
        params: &[
            user("length_gamma0", "length of gamma_0"),
            user("A", "1/regulator"),
            user("D", "maximal face-pairing length"),
            computed("b1", "first Betti number"),
        ],
        rhs: |ps| {
            let b1 = p(ps, "b1")?;
            let d = p(ps, "D")?;
            let base = p(ps, "A")?.mul(d).mul(&b1.sqrt()?);
            Ok(base.pow(b1)?.mul(d).mul(b1))
        },
    },
    BoundEntry {
        id: "regulator_independent",
        title: "regulator-free bound on (1-E)/sqrt(lambda) when b1 = 1",
        formula: "(1-E)/sqrt(lambda) <= 3 pi C^2 V + (C/2) sqrt(vol) + C^2 (2 sqrt2 D^2 vol^(delta+1/2) sarea_ratio + 5 pi)",
        relation: Relation::AtMost,
        lhs: "damped_inv_sqrt_lambda",
        params: &[
            user("damped_inv_sqrt_lambda", "(1-E)/sqrt(lambda_1^1 coexact)"),
            user("C", "Sobolev constant C(lambda)"),
            user("V", "boundary volume of the fundamental domain"),
            user("D", "maximal face-pairing length"),
            user("delta", "exponent slack delta > 0"),
            user("sarea_ratio", "sup of sArea/length over the explicit null-homologous set"),
            computed("vol", "volume of M"),
        ],
        rhs: regulator_rhs,
    },
    BoundEntry {
        id: "exp_gap",
        title: "exponential bound on the inverse gap",
        formula: "1/lambda <= exp(H vol)",
        relation: Relation::AtMost,
        lhs: "inv_lambda",
        params: &[
            computed("inv_lambda", "1/lambda_1^1"),
            user("H", "constant H_{M0}"),
            computed("vol", "volume of M"),
        ],
        rhs: |ps| Ok(p(ps, "H")?.mul(p(ps, "vol")?).exp()),
    },
    BoundEntry {
        id: "high_dim_scl",
        title: "scl/length in high dimension under polynomial gap",
        formula: "scl/length <= K vol^(1 + gap_exponent/2) diam",
        relation: Relation::AtMost,
        lhs: "scl_ratio",
        params: &[
            user("scl_ratio", "scl(gamma)/length(gamma)"),
            user("K", "implied constant"),
            user("gap_exponent", "exponent c in lambda >> vol^-c"),
            computed("vol", "volume of M"),
            computed("diam", "diameter of M"),
        ],
        rhs: |ps| {
            let e = Num::int(1).add(&p(ps, "gap_exponent")?.mul(&half()));
            Ok(p(ps, "K")?.mul(&p(ps, "vol")?.pow(&e)?).mul(p(ps, "diam")?))
        },
    },
    BoundEntry {
        id: "retraction",
        title: "scl/length through a degree-d retraction",
        formula: "scl/length <= K d^2 vol(N) diam(N) sqrt(1/lambda_N')",
        relation: Relation::AtMost,
        lhs: "scl_ratio",
        params: &[
            user("scl_ratio", "scl(gamma)/length(gamma)"),
            user("K", "implied constant"),
            user("d", "degree of the retraction"),
            user("vol_N", "volume of N"),
            user("diam_N", "diameter of N"),
            user("lambda_N", "lambda_1^1 coexact of N'"),
        ],
        rhs: |ps| {
            let d = p(ps, "d")?;
            let inv = Num::int(1).div(p(ps, "lambda_N")?)?.sqrt()?;
            Ok(p(ps, "K")?.mul(&d.mul(d)).mul(p(ps, "vol_N")?).mul(p(ps, "diam_N")?).mul(&inv))
        },
    },
    BoundEntry {
        id: "lambda0_lower",
        title: "lower bound on the first eigenvalue on functions",
        formula: "lambda0 >= C(n,1,inj/2,lambda_probe)^-2 / (diam^2 vol)",
        relation: Relation::AtLeast,
        lhs: "lambda0",
        params: &[
            user("lambda0", "lambda_1^0"),
            computed("n", "dimension"),
            user("inj", "injectivity radius"),
            computed("diam", "diameter of M"),
            computed("vol", "volume of M"),
            user("lambda_probe", "eigenvalue plugged into the Moser constant"),
        ],
        rhs: |ps| {
            let l = p(ps, "inj")?.value() / 2.0;
            let c = moser(ps, l, p(ps, "lambda_probe")?)?;
            let d = p(ps, "diam")?;
            Num::int(1).div(&c.mul(&c).mul(&d.mul(d)).mul(p(ps, "vol")?))
        },
    },
];

fn regulator_rhs(ps: &Params) -> Result<Num> {
    let (c2, tail) = c_term(ps)?;
    let d = p(ps, "D")?;
    let vol_pow = p(ps, "vol")?.pow(&p(ps, "delta")?.add(&half()))?;
    let two_sqrt2 = Num::int(8).sqrt()?;
    let periods = two_sqrt2.mul(&d.mul(d)).mul(&vol_pow).mul(p(ps, "sarea_ratio")?).add(&Num::int(5).mul(&Num::pi()));
    let main = Num::int(3).mul(&Num::pi()).mul(&c2).mul(p(ps, "V")?);
    Ok(main.add(&tail).add(&c2.mul(&periods)))
}

pub fn catalogue() -> &'static [BoundEntry] {
    CATALOGUE
}

pub fn entry(id: &str) -> Result<&'static BoundEntry> {
    CATALOGUE.iter().find(|e| e.id == id).ok_or_else(|| Error::UnknownBound(id.to_string()))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SubstitutedValue {
    pub name: String,
    pub value: NumReport,
    pub provenance: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BoundReport {
    pub id: String,
    pub formula: String,
    pub relation: Relation,
    pub values: Vec<SubstitutedValue>,
    pub lhs: Option<NumReport>,
    pub rhs: Option<NumReport>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// Decides `lhs rel rhs`, reporting marginal within relative gap [`MARGINAL`]
/// or when interval enclosures overlap.
pub fn compare(lhs: &Num, rhs: &Num, rel: Relation) -> Verdict {
    let (l, r) = match rel {
        Relation::AtMost => (lhs, rhs),
        Relation::AtLeast => (rhs, lhs),
    };
    let scale = l.value().abs().max(r.value().abs());
    if (l.value() - r.value()).abs() <= MARGINAL * scale {
        return Verdict::Marginal;
    }
    match (l, r) {
        (Num::Exact(a), Num::Exact(b)) => {
            if a <= b {
                Verdict::Holds
            } else {
                Verdict::Fails
            }
        }
        _ => {
            let (_, lh) = l.bounds();
            let (rl, _) = r.bounds();
            let (ll, _) = l.bounds();
            let (_, rh) = r.bounds();
            if lh <= rl {
                Verdict::Holds
            } else if ll > rh {
                Verdict::Fails
            } else {
                Verdict::Marginal
            }
        }
    }
}

fn substituted(e: &BoundEntry, ps: &Params) -> Vec<SubstitutedValue> {
    e.params
        .iter()
        .filter_map(|s| {
            let v = ps.get(s.name)?;
            Some(SubstitutedValue {
                name: s.name.to_string(),
                value: v.render(),
                provenance: ps.provenance(s.name).map(ToString::to_string).unwrap_or_default(),
            })
        })
        .collect()
}

/// Evaluates catalogue entry `id`. Every parameter except the left-hand side
/// must be present; without the left-hand side only the bound is reported.
pub fn evaluate_bound(id: &str, ps: &Params) -> Result<BoundReport> {
    let e = entry(id)?;
    for s in e.params {
        if s.name != e.lhs && ps.get(s.name).is_none() {
            return Err(Error::MissingParameter(s.name.to_string()));
        }
    }
    let rhs = (e.rhs)(ps)?;
    let lhs = ps.get(e.lhs).cloned();
    let mut notes = Vec::new();
    let mut verdict = match &lhs {
        Some(l) => compare(l, &rhs, e.relation),
        None => {
            notes.push(format!("no value for `{}`; bound only", e.lhs));
            Verdict::NotApplicable
        }
    };
    let user_constants: Vec<&str> =
        e.params.iter().filter(|s| ps.provenance(s.name) == Some(&Provenance::User) && s.name != e.lhs).map(|s| s.name).collect();
    if !user_constants.is_empty() {
        notes.push(format!("user-supplied: {}", user_constants.join(", ")));
    }
    let empirical: Vec<&str> = e
        .params
        .iter()
        .filter(|s| matches!(ps.provenance(s.name), Some(Provenance::Computed(src)) if src.contains("empirical")))
        .map(|s| s.name)
        .collect();
    if !empirical.is_empty() {
        notes.push(format!("empirical estimates: {}", empirical.join(", ")));
    }
    if e.id == "dichotomy" {
        let alt1 = dichotomy_first(ps)?;
        match compare(p(ps, "lambda_w")?, &alt1, Relation::AtLeast) {
            Verdict::Holds => {
                notes.push("first alternative holds: lambda_w >= 1/(4 G_M0^2 C_M0^2 vol)".into());
                verdict = Verdict::Holds;
            }
            v => notes.push(format!("first alternative: {v}")),
        }
    }
    Ok(BoundReport {
        id: e.id.to_string(),
        formula: e.formula.to_string(),
        relation: e.relation,
        values: substituted(e, ps),
        lhs: lhs.map(|l| l.render()),
        rhs: Some(rhs.render()),
        verdict,
        notes,
    })
}

fn dichotomy_first(ps: &Params) -> Result<Num> {
    let g = p(ps, "G_M0")?;
    let c = p(ps, "C_M0")?;
    Num::int(1).div(&Num::int(4).mul(g).mul(g).mul(c).mul(c).mul(p(ps, "vol")?))
}

/// Evaluates every entry; entries with missing parameters are reported as
/// not-applicable rather than aborting.
pub fn evaluate_all(ps: &Params) -> Vec<BoundReport> {
    CATALOGUE
        .iter()
        .map(|e| {
            evaluate_bound(e.id, ps).unwrap_or_else(|err| BoundReport {
                id: e.id.to_string(),
                formula: e.formula.to_string(),
                relation: e.relation,
                values: substituted(e, ps),
                lhs: None,
                rhs: None,
                verdict: Verdict::NotApplicable,
                notes: vec![err.to_string()],
            })
        })
        .collect()
}

/// CSV summary: one line per report.
pub fn reports_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from("id,relation,lhs,rhs,verdict\n");
    let fmt = |n: &Option<NumReport>| n.as_ref().map(|v| format!("{:e}", v.value)).unwrap_or_default();
    for r in reports {
        let rel = match r.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        out.push_str(&format!("{},{},{},{},{}\n", r.id, rel, fmt(&r.lhs), fmt(&r.rhs), r.verdict));
    }
    out
}

/// Diameter of the 1-skeleton with edge lengths (unit lengths without geometry).
pub fn skeleton_diameter(k: &SimplicialComplex, geom: Option<&Geometry>) -> Result<f64> {
    let n = k.num_cells(0);
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let index: BTreeMap<usize, usize> = k.cells(0).iter().enumerate().map(|(i, c)| (c[0], i)).collect();
    for e in k.cells(1) {
        let w = geom.and_then(|g| g.edge_length(e[0], e[1])).unwrap_or(1.0);
        let (a, b) = (index[&e[0]], index[&e[1]]);
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    let mut diam = 0.0f64;
    for s in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        dist[s] = 0.0;
        for _ in 0..n {
            let u = (0..n).filter(|&v| !done[v]).min_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
            let Some(u) = u else { break };
            if dist[u].is_infinite() {
                return Err(Error::Disconnected);
            }
            done[u] = true;
            for &(v, w) in &adj[u] {
                if dist[u] + w < dist[v] {
                    dist[v] = dist[u] + w;
                }
            }
        }
        diam = diam.max(dist.iter().copied().fold(0.0, f64::max));
    }
    Ok(diam)
}

/// Adjacency graph of top cells (two tiles adjacent when they share a facet).
pub fn tile_graph(k: &SimplicialComplex) -> Graph {
    let top = k.dim();
    let mut edges = Vec::new();
    if top > 0 {
        for facet in k.cells(top - 1) {
            let cof = k.cofaces(facet);
            for i in 0..cof.len() {
                for j in i + 1..cof.len() {
                    edges.push((cof[i], cof[j]));
                }
            }
        }
    }
    Graph::from_edges(k.num_cells(top), &edges)
}

/// Largest number of tiles in a radius-1 ball of the tile graph.
pub fn unit_ball_tiles(g: &Graph) -> usize {
    (0..g.num_vertices())
        .map(|v| {
            let mut s: Vec<usize> = g.neighbors(v).iter().map(|&(w, _)| w).collect();
            s.push(v);
            s.sort_unstable();
            s.dedup();
            s.len()
        })
        .max()
        .unwrap_or(0)
}

/// Fills pipeline-computable parameters from a complex (and optionally its
/// geometry and cover). Values supplied by the user are never overwritten.
pub fn attach_pipeline(ps: &mut Params, k: &SimplicialComplex, geom: Option<&Geometry>, cover: Option<&Cover>) -> Result<()> {
    let n = k.dim();
    ps.set_computed("n", Num::int(n as i64), "complex dimension");
    let betti = betti_numbers(k);
    if n >= 1 {
        ps.set_computed("b1", Num::int(betti[1] as i64), "integer homology rank");
    }
    match geom {
        Some(g) => ps.set_computed("vol", Num::float(g.volume(k)?), "geometry volume"),
        None => ps.set_computed("vol", Num::int(k.num_cells(n) as i64), "top-cell count"),
    }
    ps.set_computed("diam", Num::float(skeleton_diameter(k, geom)?), "1-skeleton path metric");
    let tiles = tile_graph(k);
    ps.set_computed("k0", Num::int(unit_ball_tiles(&tiles) as i64), "tile graph unit balls");
    if let Some(c) = cover {
        ps.set_computed("vol_ratio", Num::int(c.degree() as i64), "cover degree");
        let schreier = c.spec.schreier_graph();
        if schreier.is_connected() {
            let tree = shortest_path_tree(&schreier, 0)?;
            ps.set_computed("diam_T", Num::int(tree.diameter() as i64), "shortest-path tree of the tile graph");
        }
    } else if tiles.is_connected() {
        ps.set_computed("vol_ratio", Num::int(1), "complex taken as its own base");
        let tree = shortest_path_tree(&tiles, 0)?;
        ps.set_computed("diam_T", Num::int(tree.diameter() as i64), "shortest-path tree of the tile graph");
    }
    if n >= 2 {
        let comb = lambda1_split(k, 1, None, false)?;
        if let Some(l) = comb.lambda1_dstar {
            ps.set_computed("lambda", Num::approx(l, 1e-9), "combinatorial spectrum");
            ps.set_computed("inv_sqrt_lambda", Num::approx(1.0 / l.sqrt(), 1e-9), "combinatorial spectrum");
            ps.set_computed("inv_lambda", Num::approx(1.0 / l, 1e-9), "combinatorial spectrum");
        }
        let wl = match geom {
            Some(g) => lambda1_split(k, 1, Some(g), false)?.lambda1_dstar,
            None => comb.lambda1_dstar,
        };
        if let Some(l) = wl {
            let src = if geom.is_some() { "Whitney spectrum" } else { "Whitney spectrum (identity Gram)" };
            ps.set_computed("lambda_w", Num::approx(l, 1e-9), src);
        }
        let (g, c) = empirical_dichotomy_constants(k, geom)?;
        ps.set_computed("G_M0", Num::approx(g, 1e-9), "empirical norm comparison");
        ps.set_computed("C_M0", Num::approx(c, 1e-9), "empirical sup-norm estimate");
    }
    Ok(())
}

/// Empirical (G, C): G = sqrt(λmax(M₁)/λmin(M₂)) compares the Whitney and
/// combinatorial Rayleigh quotients; C is the sampled sup/L² ratio in degree 1.
pub fn empirical_dichotomy_constants(k: &SimplicialComplex, geom: Option<&Geometry>) -> Result<(f64, f64)> {
    let m1 = inner_product(k, geom, 1)?;
    let m2 = inner_product(k, geom, 2)?;
    let (_, max1) = norm_equivalence_constants(&m1)?;
    let (min2, _) = norm_equivalence_constants(&m2)?;
    let g = max1 / min2;
    let c = match geom {
        Some(geo) => empirical_sup_constants(k, geo, 1, 6)?.sup_over_l2,
        None => 1.0,
    };
    Ok((g, c))
}

/// Checks the dichotomy with the given constants (empirical estimates when
/// absent).
pub fn check_dichotomy(k: &SimplicialComplex, geom: Option<&Geometry>, g: Option<f64>, c: Option<f64>) -> Result<BoundReport> {
    let mut ps = Params::new();
    if let Some(g) = g {
        ps.set_user("G_M0", Num::float(g));
    }
    if let Some(c) = c {
        ps.set_user("C_M0", Num::float(c));
    }
    attach_pipeline(&mut ps, k, geom, None)?;
    let mut r = evaluate_bound("dichotomy", &ps)?;
    r.notes.push("smooth gap replaced by the combinatorial gap".into());
    Ok(r)
}

/// Checks a filling certificate against the degree-1 coexact gap:
/// ‖g‖² λ₁ ≤ (1+δ)‖f‖² (dual norms) and chi_bound = 4‖mg‖₁.
pub fn verify_filling_chain(cert: &FillingCertificate, split: &SpectralSplit) -> Result<BoundReport> {
    if split.degree != 1 || split.inner != cert.inner {
        return Err(Error::InvalidParameter(format!(
            "certificate ({}) and spectrum ({}, degree {}) come from different pipelines",
            cert.inner, split.inner, split.degree
        )));
    }
    let mut notes = Vec::new();
    let base = BoundReport {
        id: "filling_chain".into(),
        formula: "|g|^2 lambda_1 <= (1 + delta) |f|^2 and chi_bound = 4 |m g|_1".into(),
        relation: Relation::AtMost,
        values: Vec::new(),
        lhs: None,
        rhs: None,
        verdict: Verdict::NotApplicable,
        notes: Vec::new(),
    };
    if cert.f.iter().all(|&v| v == 0) {
        return Ok(BoundReport { notes: vec!["zero cycle".into()], ..base });
    }
    let Some(lambda) = split.lambda1_dstar else {
        return Ok(BoundReport { notes: vec!["no coexact spectrum".into()], ..base });
    };
    let lhs = cert.g_norm_sq * lambda;
    let rhs = (1.0 + cert.delta) * cert.f_norm_sq;
    let scaled: BigInt = cert.g.iter().map(|x| (x * Rational::from_integer(cert.m.clone())).to_integer().abs()).sum();
    let chi_ok = scaled == cert.one_norm && cert.chi_bound == &cert.one_norm * BigInt::from(4);
    if !chi_ok {
        notes.push("chi_bound does not equal 4 |m g|_1".into());
    }
    let norm_ok = lhs <= rhs * (1.0 + MARGINAL);
    if !norm_ok {
        notes.push("filling norm exceeds the spectral bound".into());
    }
    let values = vec![
        SubstitutedValue { name: "g_norm_sq".into(), value: Num::float(cert.g_norm_sq).render(), provenance: "computed:certificate".into() },
        SubstitutedValue { name: "f_norm_sq".into(), value: Num::float(cert.f_norm_sq).render(), provenance: "computed:certificate".into() },
        SubstitutedValue { name: "lambda_dstar".into(), value: Num::float(lambda).render(), provenance: "computed:spectrum".into() },
        SubstitutedValue { name: "delta".into(), value: Num::float(cert.delta).render(), provenance: "user".into() },
    ];
    Ok(BoundReport {
        values,
        lhs: Some(Num::float(lhs).render()),
        rhs: Some(Num::float(rhs).render()),
        verdict: if chi_ok && norm_ok { Verdict::Holds } else { Verdict::Fails },
        notes,
        ..base
    })
}

/// Exact inverse-gap sum from the characteristic polynomial, for reporting
/// next to the exponential bound.
pub fn exact_inverse_gap(k: &SimplicialComplex) -> Result<(Rational, f64)> {
    let (s, b) = charpoly_gap_bound(k, 1)?;
    Ok((s, b.lambda1))
}

/// Parses a parameter value: integers, fractions `a/b`, decimals.
pub fn parse_num(s: &str) -> Result<Num> {
    crate::exact::parse_rational(s).map(Num::Exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;
    use crate::triangulations;

    fn params(pairs: &[(&str, &str)]) -> Params {
        let mut ps = Params::new();
        for (k, v) in pairs {
            ps.set_user(k, parse_num(v).unwrap());
        }
        ps
    }

    #[test]
    fn hand_substitutions() {
        let r = evaluate_bound("dirichlet_diam", &params(&[("diam", "2")])).unwrap();
        assert_eq!(r.rhs.unwrap().exact.as_deref(), Some("4"));
        assert_eq!(r.verdict, Verdict::NotApplicable);
        let r = evaluate_bound("tree_area", &params(&[("vol_dF0", "10"), ("vol_ratio", "6"), ("vol_dFT", "59")])).unwrap();
        assert_eq!(r.rhs.unwrap().exact.as_deref(), Some("60"));
        assert_eq!(r.verdict, Verdict::Holds);
        let r = evaluate_bound("tree_diam", &params(&[("diam_F0", "3/2"), ("diam_T", "4"), ("diam_FT", "8")])).unwrap();
        assert_eq!(r.rhs.unwrap().exact.as_deref(), Some("15/2"));
        assert_eq!(r.verdict, Verdict::Fails);
    }

    #[test]
    fn marginal_near_equality() {
        let r = evaluate_bound("dirichlet_diam", &params(&[("diam", "2"), ("diam_F", "4.000000000001")])).unwrap();
        assert_eq!(r.verdict, Verdict::Marginal);
        let r = evaluate_bound("exp_gap", &params(&[("H", "1"), ("vol", "1"), ("inv_lambda", "2.718281828459045")])).unwrap();
        assert_eq!(r.verdict, Verdict::Marginal);
    }

    #[test]
    fn missing_and_unknown() {
        assert!(matches!(evaluate_bound("nope", &Params::new()), Err(Error::UnknownBound(_))));
        assert!(matches!(evaluate_bound("tree_area", &params(&[("vol_dF0", "1")])), Err(Error::MissingParameter(_))));
    }

    #[test]
    fn exact_arithmetic() {
        let a = Num::Exact(q(9)).sqrt().unwrap();
        assert_eq!(a, Num::int(3));
        let b = Num::Exact(q(2)).pow(&Num::int(-2)).unwrap();
        assert_eq!(b, Num::Exact(Rational::new(BigInt::one(), BigInt::from(4))));
        let (lo, hi) = Num::Exact(q(2)).sqrt().unwrap().bounds();
        assert!(lo < std::f64::consts::SQRT_2 && std::f64::consts::SQRT_2 < hi);
    }

    #[test]
    fn identity_gram_dichotomy_holds() {
        let k = triangulations::torus7();
        let r = check_dichotomy(&k, None, None, None).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn torus_k0() {
        let k = triangulations::torus7();
        assert_eq!(unit_ball_tiles(&tile_graph(&k)), 4);
        assert_eq!(skeleton_diameter(&k, None).unwrap(), 1.0);
    }
}
