//! The family catalog: masks, refinable vectors, boundary generators and
//! their two-scale tables for the five spline wavelet families.
//!
//! All construction runs in exact rational arithmetic and is frozen to `f64`
//! once, so boundary values and support edges are exact zeros rather than
//! rounding residue.

mod catalog;

use crate::dyadic::Dyadic;
use crate::filters::{FilterBank, Mask, MatchingJets};
use crate::poly::{PiecewisePolynomial, VectorFunction};
use crate::ratio::{q, Q};
use num_complex::Complex64;
use std::str::FromStr;

/// The five implemented families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyId {
    B3,
    B4,
    Sr3,
    Hmt,
    R3,
}

impl FamilyId {
    pub const ALL: [FamilyId; 5] = [
        FamilyId::B3,
        FamilyId::B4,
        FamilyId::Sr3,
        FamilyId::Hmt,
        FamilyId::R3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyId::B3 => "b3",
            FamilyId::B4 => "b4",
            FamilyId::Sr3 => "sr3",
            FamilyId::Hmt => "hmt",
            FamilyId::R3 => "r3",
        }
    }

    fn def(&self) -> &'static catalog::FamilyDef {
        match self {
            FamilyId::B3 => &catalog::B3,
            FamilyId::B4 => &catalog::B4,
            FamilyId::Sr3 => &catalog::SR3,
            FamilyId::Hmt => &catalog::HMT,
            FamilyId::R3 => &catalog::R3,
        }
    }
}

impl FromStr for FamilyId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "b3" => Ok(FamilyId::B3),
            "b4" => Ok(FamilyId::B4),
            "sr3" => Ok(FamilyId::Sr3),
            "hmt" => Ok(FamilyId::Hmt),
            "r3" => Ok(FamilyId::R3),
            other => Err(format!(
                "unknown family '{other}' (expected b3, b4, sr3, hmt, r3)"
            )),
        }
    }
}

/// Target of one term in a two-scale expansion, at the doubled scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slot {
    /// A boundary scaling generator `g(2·)`, by index.
    Gen(usize),
    /// An interior component `φ^{comp}(2· − shift)`.
    Phi { shift: i64, comp: usize },
}

/// A boundary generator: its exact function on `[0, ∞)` and its two-scale
/// expansion over the scaling generators and interior shifts.
#[derive(Debug, Clone)]
pub struct Generator {
    pub name: String,
    /// Satisfies the homogeneous Dirichlet condition at its endpoint.
    pub bc: bool,
    pub f: PiecewisePolynomial,
    pub two_scale: Vec<(Slot, f64)>,
}

/// Ordered-set layout of Φ or Ψ for one variant at level `j`:
/// left generators, interior `k ∈ [k_lo, 2^j − k_hi_minus]` (each shift
/// contributing all `r` components), reflected right generators with signs,
/// and optionally the free right function (the reflected `phiL`/`psiL`).
#[derive(Debug, Clone)]
pub struct SetLayout {
    pub left: Vec<usize>,
    pub k_lo: i64,
    pub k_hi_minus: i64,
    pub right_bc: Vec<(usize, f64)>,
    pub right_free: Option<(usize, f64)>,
}

impl SetLayout {
    fn from_def(def: &catalog::LayoutDef) -> Self {
        SetLayout {
            left: def.left.to_vec(),
            k_lo: def.k_lo,
            k_hi_minus: def.k_hi_minus,
            right_bc: def
                .right_bc
                .iter()
                .map(|(i, s)| (*i, q(s).to_f64()))
                .collect(),
            right_free: def.right_free.map(|(i, s)| (i, q(s).to_f64())),
        }
    }

    /// Interior shift range `[k_lo, hi]` at level `j` (empty when `hi < k_lo`).
    pub fn interior_range(&self, j: u32) -> (i64, i64) {
        (self.k_lo, (1i64 << j) - self.k_hi_minus)
    }

    /// Number of functions in the set at level `j` for component count `r`.
    pub fn count(&self, j: u32, r: usize) -> usize {
        let (lo, hi) = self.interior_range(j);
        let interior = (hi - lo + 1).max(0) as usize;
        self.left.len()
            + self.right_bc.len()
            + self.right_free.is_some() as usize
            + interior * r
    }
}

/// One family, fully instantiated: filter bank, interior generators, boundary
/// generators, set layouts, and reflection structure.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub id: FamilyId,
    pub r: usize,
    pub min_level: u32,
    pub recombined: bool,
    pub bank: FilterBank,
    pub phi: VectorFunction,
    pub psi: VectorFunction,
    pub scaling_gens: Vec<Generator>,
    pub wavelet_gens: Vec<Generator>,
    /// `φ^c(−y) = sign · φ^{c'}(y − d)` per component, as `(c', d, sign)`.
    pub reflect_phi: Vec<(usize, i64, f64)>,
    /// Interior slots that coincide with scaling generators.
    pub aliases: Vec<((i64, usize), usize)>,
    pub phi_x: SetLayout,
    pub phi_y: SetLayout,
    pub psi_x: SetLayout,
    pub psi_y: SetLayout,
}

// ---------------------------------------------------------------------------
// exact piecewise polynomials over Q, used only during construction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct RatPw {
    breaks: Vec<Dyadic>,
    /// local coefficients in powers of `(x − left)`
    pieces: Vec<Vec<Q>>,
}

fn dyadic_to_q(d: &Dyadic) -> Q {
    Q::new(d.numerator() as i128, 1i128 << d.log2_denominator())
}

impl RatPw {
    /// From unit-interval pieces `(left, coeffs in plain x)`.
    fn from_unit_pieces(pieces: &[(i64, &[&str])]) -> Self {
        let mut breaks = Vec::new();
        let mut local = Vec::new();
        for (i, (l, cs)) in pieces.iter().enumerate() {
            if i == 0 {
                breaks.push(Dyadic::from_int(*l));
            } else {
                assert_eq!(pieces[i - 1].0 + 1, *l, "pieces must tile unit intervals");
            }
            breaks.push(Dyadic::from_int(l + 1));
            let plain: Vec<Q> = cs.iter().map(|s| q(s)).collect();
            local.push(rat_recenter_correct(&plain, Q::from_int(*l)));
        }
        RatPw {
            breaks,
            pieces: local,
        }
    }

    fn zero() -> Self {
        RatPw {
            breaks: vec![Dyadic::ZERO, Dyadic::ONE],
            pieces: vec![vec![Q::ZERO]],
        }
    }

    /// `f(2x − k)` (no normalization).
    fn compose_2x_minus(&self, k: i64) -> Self {
        let breaks: Vec<Dyadic> = self
            .breaks
            .iter()
            .map(|t| t.add_int_then_halve(k, 1))
            .collect();
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut pow = Q::ONE;
                p.iter()
                    .map(|&c| {
                        let v = c * pow;
                        pow = pow * Q::from_int(2);
                        v
                    })
                    .collect()
            })
            .collect();
        RatPw { breaks, pieces }
    }

    /// `f(x − k)` for integer `k`.
    fn shift(&self, k: i64) -> Self {
        RatPw {
            breaks: self
                .breaks
                .iter()
                .map(|t| t.add(&Dyadic::from_int(k)))
                .collect(),
            pieces: self.pieces.clone(),
        }
    }

    fn piece_containing(&self, x: &Dyadic) -> Option<usize> {
        if *x < self.breaks[0] || *x >= *self.breaks.last().unwrap() {
            return None;
        }
        (0..self.pieces.len()).find(|&i| *x >= self.breaks[i] && *x < self.breaks[i + 1])
    }

    fn linear_combination(terms: &[(Q, RatPw)]) -> Self {
        assert!(!terms.is_empty());
        let mut breaks: Vec<Dyadic> = terms
            .iter()
            .flat_map(|(_, p)| p.breaks.iter().copied())
            .collect();
        breaks.sort();
        breaks.dedup();
        let mut pieces = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            let mut acc = vec![Q::ZERO; 4];
            for (c, p) in terms {
                if let Some(i) = p.piece_containing(&w[0]) {
                    let shift = dyadic_to_q(&w[0].sub(&p.breaks[i]));
                    let re = rat_recenter_correct(&p.pieces[i], shift);
                    for (k, v) in re.iter().enumerate() {
                        acc[k] = acc[k] + *c * *v;
                    }
                }
            }
            while acc.len() > 1 && acc.last().unwrap().is_zero() {
                acc.pop();
            }
            pieces.push(acc);
        }
        RatPw { breaks, pieces }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        let zero = |p: &Vec<Q>| p.iter().all(|c| c.is_zero());
        while self.pieces.len() > 1 && zero(&self.pieces[0]) {
            self.pieces.remove(0);
            self.breaks.remove(0);
        }
        while self.pieces.len() > 1 && zero(self.pieces.last().unwrap()) {
            self.pieces.pop();
            self.breaks.pop();
        }
        self
    }

    /// `f · χ_{[0,∞)}`; requires 0 to be a breakpoint or outside the support.
    fn truncate_nonneg(&self) -> Self {
        let zero = Dyadic::ZERO;
        if self.breaks[0] >= zero {
            return self.clone();
        }
        let pos = self
            .breaks
            .iter()
            .position(|b| *b == zero)
            .expect("truncation point must be a breakpoint");
        assert!(pos < self.pieces.len(), "support entirely negative");
        RatPw {
            breaks: self.breaks[pos..].to_vec(),
            pieces: self.pieces[pos..].to_vec(),
        }
        .trimmed()
    }

    fn to_poly(&self) -> PiecewisePolynomial {
        PiecewisePolynomial::new(
            self.breaks.clone(),
            self.pieces
                .iter()
                .map(|p| p.iter().map(|c| c.to_f64()).collect())
                .collect(),
        )
    }
}

/// Exact re-centering `p(t + shift)` (binomial expansion in Q).
fn rat_recenter_correct(coeffs: &[Q], shift: Q) -> Vec<Q> {
    let n = coeffs.len();
    let mut out = vec![Q::ZERO; n];
    for (k, &c) in coeffs.iter().enumerate() {
        // C(k, j) shift^j onto power k-j
        let mut binom = Q::ONE;
        let mut pow = Q::ONE;
        for j in 0..=k {
            out[k - j] = out[k - j] + c * binom * pow;
            binom = binom * Q::new((k - j) as i128, (j + 1) as i128);
            pow = pow * shift;
        }
    }
    out
}

// ---------------------------------------------------------------------------

fn build_mask(def: &catalog::MaskDef, r: usize) -> Mask {
    let taps = def
        .taps
        .iter()
        .map(|row| {
            assert_eq!(row.len(), r * r);
            row.iter().map(|s| q(s).to_f64()).collect()
        })
        .collect();
    Mask::new(def.lo, r, taps)
}

fn build_jets(rows: &[&[(&str, &str)]]) -> Vec<Vec<Complex64>> {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|(re, im)| Complex64::new(q(re).to_f64(), q(im).to_f64()))
                .collect()
        })
        .collect()
}

/// Exact 3×3 inverse in Q (used by the b4 recombination).
fn invert3(m: &[[Q; 3]; 3]) -> [[Q; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    assert!(!det.is_zero(), "recombination matrix is singular");
    let inv_det = det.recip();
    // adjugate transpose: out[i][j] = cofactor(j, i) / det
    let minor = |r0: usize, c0: usize| -> Q {
        let rs: Vec<usize> = (0..3).filter(|&r| r != r0).collect();
        let cs: Vec<usize> = (0..3).filter(|&c| c != c0).collect();
        m[rs[0]][cs[0]] * m[rs[1]][cs[1]] - m[rs[0]][cs[1]] * m[rs[1]][cs[0]]
    };
    let mut out = [[Q::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let sign = if (i + j) % 2 == 0 { Q::ONE } else { -Q::ONE };
            out[i][j] = sign * minor(j, i) * inv_det;
        }
    }
    out
}

impl FamilySpec {
    /// Instantiates a family. `recombined` is only meaningful for `b4`
    /// (the boundary recombination used in the high-wavenumber study) and is
    /// rejected for other families.
    pub fn load(id: FamilyId, recombined: bool) -> FamilySpec {
        assert!(
            !recombined || id == FamilyId::B4,
            "the recombined variant exists only for b4"
        );
        let def = id.def();
        let r = def.r;

        // interior refinable vector
        let phi_rat: Vec<RatPw> = def.phi.iter().map(|c| RatPw::from_unit_pieces(c)).collect();

        // psi = 2 Σ_k b(k) φ(2·−k)
        let mask_b = build_mask(&def.mask_b, r);
        let psi_rat: Vec<RatPw> = (0..r)
            .map(|i| {
                let mut terms: Vec<(Q, RatPw)> = Vec::new();
                for (ti, row) in def.mask_b.taps.iter().enumerate() {
                    let k = def.mask_b.lo + ti as i64;
                    for (j, entry) in row.iter().enumerate().take(r * r) {
                        let (ri, ci) = (j / r, j % r);
                        if ri == i {
                            let c = q(entry) * Q::from_int(2);
                            if !c.is_zero() {
                                terms.push((c, phi_rat[ci].compose_2x_minus(k)));
                            }
                        }
                    }
                }
                RatPw::linear_combination(&terms)
            })
            .collect();

        // scaling generators: truncated combinations
        let mut scal_funcs: Vec<RatPw> = def
            .scaling_gens
            .iter()
            .map(|g| {
                let mut terms: Vec<(Q, RatPw)> = Vec::new();
                for (shift, weights) in g.combo {
                    for (c, w) in weights.iter().enumerate() {
                        let qq = q(w);
                        if !qq.is_zero() {
                            terms.push((qq, phi_rat[c].shift(*shift)));
                        }
                    }
                }
                RatPw::linear_combination(&terms).truncate_nonneg()
            })
            .collect();

        // two-scale tables over Q
        let n_s = def.scaling_gens.len();
        let mut scal_rows: Vec<(Vec<Q>, Vec<(i64, usize, Q)>)> = def
            .scaling_gens
            .iter()
            .map(|g| {
                let mut gens = vec![Q::ZERO; n_s];
                for (gi, c) in g.ts_gens {
                    gens[*gi] = q(c);
                }
                let mut phi_terms = Vec::new();
                for (shift, row) in g.ts_phi {
                    for (comp, c) in row.iter().enumerate() {
                        let qq = q(c);
                        if !qq.is_zero() {
                            phi_terms.push((*shift, comp, qq));
                        }
                    }
                }
                (gens, phi_terms)
            })
            .collect();
        let mut wav_rows: Vec<(Vec<Q>, Vec<(i64, usize, Q)>)> = def
            .wavelet_gens
            .iter()
            .map(|g| {
                let mut gens = vec![Q::ZERO; n_s];
                for (gi, c) in g.ts_gens {
                    gens[*gi] = q(c);
                }
                let mut phi_terms = Vec::new();
                for (shift, row) in g.ts_phi {
                    for (comp, c) in row.iter().enumerate() {
                        let qq = q(c);
                        if !qq.is_zero() {
                            phi_terms.push((*shift, comp, qq));
                        }
                    }
                }
                (gens, phi_terms)
            })
            .collect();

        if recombined {
            // new gens g' = M g on (phiL, bc1, bc2); two-scale transforms as
            // g' = (M C M⁻¹) g'(2·) + (M V) φ, wavelet gen-coefficient rows
            // as c ↦ c M⁻¹.
            assert_eq!(n_s, 3);
            let m: [[Q; 3]; 3] = [
                [Q::ONE, q("-13/14"), q("8/14")],
                [Q::ZERO, Q::ONE, q("85/100")],
                [Q::ZERO, q("-1/2"), q("11/10")],
            ];
            let m_inv = invert3(&m);
            // functions
            let old = scal_funcs.clone();
            for i in 0..3 {
                let terms: Vec<(Q, RatPw)> = (0..3)
                    .filter(|&j| !m[i][j].is_zero())
                    .map(|j| (m[i][j], old[j].clone()))
                    .collect();
                scal_funcs[i] = RatPw::linear_combination(&terms);
            }
            // scaling rows
            let old_rows = scal_rows.clone();
            for i in 0..3 {
                let mut gens = vec![Q::ZERO; 3];
                let mut phi_terms: std::collections::BTreeMap<(i64, usize), Q> = Default::default();
                for j in 0..3 {
                    if m[i][j].is_zero() {
                        continue;
                    }
                    // M_ij * (C_j· g(2·) + V_j)
                    for l in 0..3 {
                        if !old_rows[j].0[l].is_zero() {
                            // coefficient onto old gen l -> re-express over new
                            for t in 0..3 {
                                gens[t] = gens[t] + m[i][j] * old_rows[j].0[l] * m_inv[l][t];
                            }
                        }
                    }
                    for (s, c, v) in &old_rows[j].1 {
                        let e = phi_terms.entry((*s, *c)).or_insert(Q::ZERO);
                        *e = *e + m[i][j] * *v;
                    }
                }
                scal_rows[i] = (
                    gens,
                    phi_terms
                        .into_iter()
                        .filter(|(_, v)| !v.is_zero())
                        .map(|((s, c), v)| (s, c, v))
                        .collect(),
                );
            }
            // wavelet rows: gen coefficients c ↦ c M⁻¹
            for row in &mut wav_rows {
                let mut gens = vec![Q::ZERO; 3];
                for l in 0..3 {
                    if !row.0[l].is_zero() {
                        for t in 0..3 {
                            gens[t] = gens[t] + row.0[l] * m_inv[l][t];
                        }
                    }
                }
                row.0 = gens;
            }
        }

        // wavelet generators: functions from their two-scale expansions
        let wav_funcs: Vec<RatPw> = wav_rows
            .iter()
            .map(|(gens, phi_terms)| {
                let mut terms: Vec<(Q, RatPw)> = Vec::new();
                for (gi, c) in gens.iter().enumerate() {
                    if !c.is_zero() {
                        terms.push((*c, scal_funcs[gi].compose_2x_minus(0)));
                    }
                }
                for (shift, comp, c) in phi_terms {
                    terms.push((*c, phi_rat[*comp].compose_2x_minus(*shift)));
                }
                RatPw::linear_combination(&terms)
            })
            .collect();

        let freeze_rows = |rows: &[(Vec<Q>, Vec<(i64, usize, Q)>)]| -> Vec<Vec<(Slot, f64)>> {
            rows.iter()
                .map(|(gens, phi_terms)| {
                    let mut out: Vec<(Slot, f64)> = gens
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(i, c)| (Slot::Gen(i), c.to_f64()))
                        .collect();
                    out.extend(
                        phi_terms
                            .iter()
                            .map(|(s, c, v)| (Slot::Phi { shift: *s, comp: *c }, v.to_f64())),
                    );
                    out
                })
                .collect()
        };
        let scal_ts = freeze_rows(&scal_rows);
        let wav_ts = freeze_rows(&wav_rows);

        let scaling_gens: Vec<Generator> = def
            .scaling_gens
            .iter()
            .zip(scal_funcs.iter().zip(scal_ts))
            .map(|(d, (f, ts))| Generator {
                name: d.name.into(),
                bc: d.bc,
                f: f.to_poly(),
                two_scale: ts,
            })
            .collect();
        let wavelet_gens: Vec<Generator> = def
            .wavelet_gens
            .iter()
            .zip(wav_funcs.iter().zip(wav_ts))
            .map(|(d, (f, ts))| Generator {
                name: d.name.into(),
                bc: d.bc,
                f: f.to_poly(),
                two_scale: ts,
            })
            .collect();

        let bank = FilterBank {
            family_id: def.name.into(),
            a: build_mask(&def.mask_a, r),
            b: mask_b,
            a_dual: build_mask(&def.mask_a_dual, r),
            b_dual: build_mask(&def.mask_b_dual, r),
            phi_hat0: def.phi_hat0.iter().map(|s| q(s).to_f64()).collect(),
            phi_dual_hat0: def.phi_dual_hat0.iter().map(|s| q(s).to_f64()).collect(),
            sum_rule_order: def.sum_rules,
            matching_filters: if def.jets_primal.is_empty() {
                None
            } else {
                Some(MatchingJets {
                    primal: build_jets(def.jets_primal),
                    dual: build_jets(def.jets_dual),
                })
            },
        };

        FamilySpec {
            id,
            r,
            min_level: def.min_level,
            recombined,
            bank,
            phi: VectorFunction::new(phi_rat.iter().map(|p| p.to_poly()).collect()),
            psi: VectorFunction::new(psi_rat.iter().map(|p| p.to_poly()).collect()),
            scaling_gens,
            wavelet_gens,
            reflect_phi: def
                .reflect_phi
                .iter()
                .map(|(c, d, s)| (*c, *d, q(s).to_f64()))
                .collect(),
            aliases: def.aliases.to_vec(),
            phi_x: SetLayout::from_def(&def.phi_x),
            phi_y: SetLayout::from_def(&def.phi_y),
            psi_x: SetLayout::from_def(&def.psi_x),
            psi_y: SetLayout::from_def(&def.psi_y),
        }
    }

    /// Expected tap-entry sums (transcription checksums) as rationals.
    pub fn mask_checksums(id: FamilyId) -> [(&'static str, &'static str); 4] {
        let def = id.def();
        [
            ("a", def.mask_a.sum),
            ("b", def.mask_b.sum),
            ("a_dual", def.mask_a_dual.sum),
            ("b_dual", def.mask_b_dual.sum),
        ]
    }

    /// The versioned catalog text (family id, dimension, supports, rational
    /// tap values) for external diffing.
    pub fn catalog_text() -> String {
        let mut out = String::from("helios family catalog v1\n");
        for id in FamilyId::ALL {
            let def = id.def();
            out.push_str(&format!(
                "family {} r={} min_level={}\n",
                def.name, def.r, def.min_level
            ));
            out.push_str(&format!(
                "  phi_hat0 = {}\n  phi_dual_hat0 = {}\n",
                def.phi_hat0.join(" "),
                def.phi_dual_hat0.join(" ")
            ));
            for (nm, m) in [
                ("a", &def.mask_a),
                ("b", &def.mask_b),
                ("a_dual", &def.mask_a_dual),
                ("b_dual", &def.mask_b_dual),
            ] {
                let hi = m.lo + m.taps.len() as i64 - 1;
                out.push_str(&format!(
                    "  mask {nm} support=[{},{}] sum={}\n",
                    m.lo, hi, m.sum
                ));
                for (i, row) in m.taps.iter().enumerate() {
                    out.push_str(&format!("    k={}: {}\n", m.lo + i as i64, row.join(" ")));
                }
            }
        }
        out
    }
}
