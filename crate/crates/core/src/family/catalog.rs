//! Static data tables for the five filter-bank families.
//!
//! Every number is a rational literal; construction happens in exact
//! arithmetic (see the parent module) and is frozen to `f64` once. The
//! per-mask `sum` fields are re-entry checksums over all tap entries.
//!
//! Note on hmt: the printed source values `2921/2761` (in `b`) and
//! `7469/29814` (in `b_dual`) do not satisfy the perfect-reconstruction
//! identity; solving the identity exactly with every other tap fixed has the
//! unique solution `2921/2716` and `7469/29184` (digit transpositions),
//! which is what this table carries.

/// One mask: support start, dimension, and row-major `r²` entries per tap.
pub(super) struct MaskDef {
    pub lo: i64,
    pub taps: &'static [&'static [&'static str]],
    /// Exact sum of all entries, as a rational literal.
    pub sum: &'static str,
}

/// One scalar component of the refinable vector: unit-interval pieces
/// `(left_end, coefficients in plain x powers)`.
pub(super) type PhiComponent = &'static [(i64, &'static [&'static str])];

/// A boundary scaling generator.
pub(super) struct ScalingGenDef {
    pub name: &'static str,
    /// Vanishes at the left endpoint.
    pub bc: bool,
    /// `f = (Σ_shift  w · φ(· − shift)) · χ_{[0,∞)}`, weights per component.
    pub combo: &'static [(i64, &'static [&'static str])],
    /// Two-scale expansion: generator terms `g_i(2·)` by index into the
    /// scaling-generator list, then interior terms `φ(2·−k)` with a
    /// coefficient row per component.
    pub ts_gens: &'static [(usize, &'static str)],
    pub ts_phi: &'static [(i64, &'static [&'static str])],
}

/// A boundary wavelet generator, defined by its two-scale expansion.
pub(super) struct WaveletGenDef {
    pub name: &'static str,
    pub bc: bool,
    pub ts_gens: &'static [(usize, &'static str)],
    pub ts_phi: &'static [(i64, &'static [&'static str])],
}

/// Membership layout of one ordered set (Φ or Ψ, one variant) at level `j`.
pub(super) struct LayoutDef {
    /// Left-edge generators, by index into the generator list.
    pub left: &'static [usize],
    /// Interior shifts `k ∈ [k_lo, 2^j − k_hi_minus]`, all components.
    pub k_lo: i64,
    pub k_hi_minus: i64,
    /// Right-edge reflected generators `(index, sign)`.
    pub right_bc: &'static [(usize, &'static str)],
    /// Trailing free right function (reflection of `phiL`/`psiL`), y-variant.
    pub right_free: Option<(usize, &'static str)>,
}

pub(super) struct FamilyDef {
    pub name: &'static str,
    pub r: usize,
    pub min_level: u32,
    pub mask_a: MaskDef,
    pub mask_b: MaskDef,
    pub mask_a_dual: MaskDef,
    pub mask_b_dual: MaskDef,
    pub phi: &'static [PhiComponent],
    pub phi_hat0: &'static [&'static str],
    pub phi_dual_hat0: &'static [&'static str],
    pub sum_rules: usize,
    /// Matching-filter jets `(re, im)` rows per derivative order, primal and
    /// dual, when the source prints them.
    pub jets_primal: &'static [&'static [(&'static str, &'static str)]],
    pub jets_dual: &'static [&'static [(&'static str, &'static str)]],
    pub scaling_gens: &'static [ScalingGenDef],
    pub wavelet_gens: &'static [WaveletGenDef],
    /// Reflection structure per φ component: `φ^c(−y) = sign · φ^{c'}(y − d)`
    /// stored as `(c', d, sign)`.
    pub reflect_phi: &'static [(usize, i64, &'static str)],
    /// Out-of-range interior slots that coincide with scaling generators:
    /// `(shift, comp) → generator index`.
    pub aliases: &'static [((i64, usize), usize)],
    pub phi_x: LayoutDef,
    pub phi_y: LayoutDef,
    pub psi_x: LayoutDef,
    pub psi_y: LayoutDef,
}

// ---------------------------------------------------------------------------
// b3: quadratic B-spline scalar family
// ---------------------------------------------------------------------------

pub(super) const B3: FamilyDef = FamilyDef {
    name: "b3",
    r: 1,
    min_level: 2,
    mask_a: MaskDef {
        lo: -1,
        taps: &[&["1/8"], &["3/8"], &["3/8"], &["1/8"]],
        sum: "1",
    },
    mask_b: MaskDef {
        lo: -3,
        taps: &[
            &["3/64"],
            &["9/64"],
            &["-7/64"],
            &["-45/64"],
            &["45/64"],
            &["7/64"],
            &["-9/64"],
            &["-3/64"],
        ],
        sum: "0",
    },
    mask_a_dual: MaskDef {
        lo: -3,
        taps: &[
            &["3/64"],
            &["-9/64"],
            &["-7/64"],
            &["45/64"],
            &["45/64"],
            &["-7/64"],
            &["-9/64"],
            &["3/64"],
        ],
        sum: "1",
    },
    mask_b_dual: MaskDef {
        lo: -1,
        taps: &[&["1/8"], &["-3/8"], &["3/8"], &["-1/8"]],
        sum: "0",
    },
    phi: &[&[
        (-1, &["1/2", "1", "1/2"]),
        (0, &["1/2", "1", "-1"]),
        (1, &["2", "-2", "1/2"]),
    ]],
    phi_hat0: &["1"],
    phi_dual_hat0: &["1"],
    sum_rules: 3,
    jets_primal: &[],
    jets_dual: &[],
    scaling_gens: &[
        ScalingGenDef {
            name: "phiL",
            bc: false,
            combo: &[(-1, &["1"]), (0, &["1"])],
            ts_gens: &[(0, "1")],
            ts_phi: &[(1, &["3/4"]), (2, &["1/4"])],
        },
        ScalingGenDef {
            name: "phiLbc",
            bc: true,
            combo: &[(-1, &["-1/2"]), (0, &["1/2"])],
            ts_gens: &[(1, "1/2")],
            ts_phi: &[(1, &["3/8"]), (2, &["1/8"])],
        },
    ],
    wavelet_gens: &[
        WaveletGenDef {
            name: "psiL",
            bc: false,
            ts_gens: &[(0, "1")],
            ts_phi: &[(1, &["-11/4"]), (2, &["31/12"]), (3, &["-5/6"])],
        },
        WaveletGenDef {
            name: "psiLbc1",
            bc: true,
            ts_gens: &[(1, "2")],
            ts_phi: &[(1, &["-47/30"]), (2, &["13/10"]), (3, &["-2/5"])],
        },
        WaveletGenDef {
            name: "psiLbc2",
            bc: true,
            ts_gens: &[],
            ts_phi: &[(1, &["2"]), (2, &["-6"]), (3, &["6"]), (4, &["-2"])],
        },
    ],
    reflect_phi: &[(0, -1, "1")],
    aliases: &[],
    phi_x: LayoutDef {
        left: &[1],
        k_lo: 1,
        k_hi_minus: 2,
        right_bc: &[(1, "1")],
        right_free: None,
    },
    phi_y: LayoutDef {
        left: &[1],
        k_lo: 1,
        k_hi_minus: 2,
        right_bc: &[(1, "1")],
        right_free: Some((0, "1")),
    },
    psi_x: LayoutDef {
        left: &[1, 2],
        k_lo: 2,
        k_hi_minus: 3,
        right_bc: &[(1, "1"), (2, "1")],
        right_free: None,
    },
    psi_y: LayoutDef {
        left: &[1, 2],
        k_lo: 2,
        k_hi_minus: 3,
        right_bc: &[(1, "1")],
        right_free: Some((0, "1")),
    },
};

// ---------------------------------------------------------------------------
// b4: cubic B-spline scalar family
// ---------------------------------------------------------------------------

pub(super) const B4: FamilyDef = FamilyDef {
    name: "b4",
    r: 1,
    min_level: 3,
    mask_a: MaskDef {
        lo: -2,
        taps: &[&["1/16"], &["1/4"], &["3/8"], &["1/4"], &["1/16"]],
        sum: "1",
    },
    mask_b: MaskDef {
        lo: -6,
        taps: &[
            &["-1/128"],
            &["-1/32"],
            &["-1/256"],
            &["9/64"],
            &["31/256"],
            &["-11/32"],
            &["-23/64"],
            &["31/32"],
            &["-23/64"],
            &["-11/32"],
            &["31/256"],
            &["9/64"],
            &["-1/256"],
            &["-1/32"],
            &["-1/128"],
        ],
        sum: "0",
    },
    mask_a_dual: MaskDef {
        lo: -7,
        taps: &[
            &["1/128"],
            &["-1/32"],
            &["1/256"],
            &["9/64"],
            &["-31/256"],
            &["-11/32"],
            &["23/64"],
            &["31/32"],
            &["23/64"],
            &["-11/32"],
            &["-31/256"],
            &["9/64"],
            &["1/256"],
            &["-1/32"],
            &["1/128"],
        ],
        sum: "1",
    },
    mask_b_dual: MaskDef {
        lo: -1,
        taps: &[&["1/16"], &["-1/4"], &["3/8"], &["-1/4"], &["1/16"]],
        sum: "0",
    },
    phi: &[&[
        (-2, &["8/6", "12/6", "6/6", "1/6"]),
        (-1, &["4/6", "0", "-1", "-1/2"]),
        (0, &["4/6", "0", "-1", "1/2"]),
        (1, &["8/6", "-12/6", "1", "-1/6"]),
    ]],
    phi_hat0: &["1"],
    phi_dual_hat0: &["1"],
    sum_rules: 4,
    jets_primal: &[],
    jets_dual: &[],
    scaling_gens: &[
        ScalingGenDef {
            name: "phiL",
            bc: false,
            combo: &[(-1, &["1"]), (0, &["1"]), (1, &["1"])],
            ts_gens: &[(0, "1")],
            ts_phi: &[(2, &["7/8"]), (3, &["1/2"]), (4, &["1/8"])],
        },
        ScalingGenDef {
            name: "phiLbc1",
            bc: true,
            combo: &[(-1, &["-1"]), (1, &["1"])],
            ts_gens: &[(1, "1/2")],
            ts_phi: &[(2, &["3/4"]), (3, &["1/2"]), (4, &["1/8"])],
        },
        ScalingGenDef {
            name: "phiLbc2",
            bc: true,
            combo: &[(-1, &["2/3"]), (0, &["-1/3"]), (1, &["2/3"])],
            ts_gens: &[(2, "1/4")],
            ts_phi: &[(2, &["11/24"]), (3, &["1/3"]), (4, &["1/12"])],
        },
    ],
    wavelet_gens: &[
        WaveletGenDef {
            name: "psiL",
            bc: false,
            ts_gens: &[(0, "1"), (1, "-527/69"), (2, "278/23")],
            ts_phi: &[
                (2, &["-61/69"]),
                (3, &["22339/43470"]),
                (4, &["-47113/173880"]),
                (5, &["3832/21735"]),
                (6, &["-18509/173880"]),
                (7, &["2/69"]),
            ],
        },
        WaveletGenDef {
            name: "psiLbc1",
            bc: true,
            ts_gens: &[],
            ts_phi: &[
                (3, &["1/8"]),
                (4, &["-1/2"]),
                (5, &["3/4"]),
                (6, &["-1/2"]),
                (7, &["1/8"]),
            ],
        },
        WaveletGenDef {
            name: "psiLbc2",
            bc: true,
            ts_gens: &[],
            ts_phi: &[
                (2, &["1/8"]),
                (3, &["-1/2"]),
                (4, &["3/4"]),
                (5, &["-1/2"]),
                (6, &["1/8"]),
            ],
        },
        WaveletGenDef {
            name: "psiLbc3",
            bc: true,
            ts_gens: &[(1, "-31/2500"), (2, "147/5000")],
            ts_phi: &[
                (2, &["-381/80000"]),
                (3, &["4517/3600000"]),
                (4, &["-169/1800000"]),
                (5, &["1757/1800000"]),
                (6, &["-3493/3600000"]),
                (7, &["21/80000"]),
            ],
        },
        WaveletGenDef {
            name: "psiLbc4",
            bc: true,
            ts_gens: &[(1, "6/125"), (2, "-307/2500")],
            ts_phi: &[
                (2, &["1869/80000"]),
                (3, &["3453/2800000"]),
                (4, &["-661/175000"]),
                (5, &["-8663/1400000"]),
                (6, &["-29521/2800000"]),
                (7, &["351/16000"]),
                (8, &["-69/8000"]),
            ],
        },
        WaveletGenDef {
            name: "psiLbc5",
            bc: true,
            ts_gens: &[(1, "11/1000"), (2, "-4/125")],
            ts_phi: &[
                (2, &["69/5000"]),
                (3, &["-1361/126000"]),
                (4, &["-6931/1260000"]),
                (5, &["12163/630000"]),
                (6, &["-9253/630000"]),
                (7, &["19/5000"]),
            ],
        },
        WaveletGenDef {
            name: "psiLbc6",
            bc: true,
            ts_gens: &[(1, "63/1000"), (2, "129/1000")],
            ts_phi: &[
                (2, &["-993/2500"]),
                (3, &["18497/70000"]),
                (4, &["64081/140000"]),
                (5, &["-6441/14000"]),
                (6, &["-17351/35000"]),
                (7, &["1913/2500"]),
                (8, &["-641/2500"]),
            ],
        },
    ],
    reflect_phi: &[(0, 0, "1")],
    aliases: &[],
    phi_x: LayoutDef {
        left: &[1, 2],
        k_lo: 2,
        k_hi_minus: 2,
        right_bc: &[(1, "1"), (2, "1")],
        right_free: None,
    },
    phi_y: LayoutDef {
        left: &[1, 2],
        k_lo: 2,
        k_hi_minus: 2,
        right_bc: &[(1, "1"), (2, "1")],
        right_free: Some((0, "1")),
    },
    psi_x: LayoutDef {
        left: &[1, 2, 3, 4],
        k_lo: 4,
        k_hi_minus: 5,
        right_bc: &[(1, "1"), (2, "1"), (3, "1"), (4, "1")],
        right_free: None,
    },
    psi_y: LayoutDef {
        left: &[1, 2, 3, 4],
        k_lo: 4,
        k_hi_minus: 5,
        right_bc: &[(1, "1"), (5, "1"), (6, "1")],
        right_free: Some((0, "1")),
    },
};

// ---------------------------------------------------------------------------
// sr3: quadratic two-component spline family with sr(a) = 3
// ---------------------------------------------------------------------------

pub(super) const SR3: FamilyDef = FamilyDef {
    name: "sr3",
    r: 2,
    min_level: 1,
    mask_a: MaskDef {
        lo: -2,
        taps: &[
            &["0", "-1/16", "0", "0"],
            &["0", "3/16", "0", "0"],
            &["1/2", "3/16", "0", "3/8"],
            &["0", "-1/16", "1/2", "3/8"],
        ],
        sum: "2",
    },
    mask_b: MaskDef {
        lo: -2,
        taps: &[
            &["0", "-1/32", "0", "-1/8"],
            &["3/8", "-9/32", "-3/2", "15/8"],
            &["1/2", "-9/32", "0", "-15/8"],
            &["3/8", "-1/32", "3/2", "1/8"],
        ],
        sum: "5/8",
    },
    mask_a_dual: MaskDef {
        lo: -2,
        taps: &[
            &["3/32", "-1/8", "0", "0"],
            &["-3/16", "3/8", "0", "0"],
            &["11/16", "3/8", "-3/32", "3/8"],
            &["-3/16", "-1/8", "7/16", "3/8"],
            &["3/32", "0", "-3/32", "0"],
        ],
        sum: "2",
    },
    mask_b_dual: MaskDef {
        lo: -2,
        taps: &[
            &["-3/32", "1/8", "3/128", "-1/32"],
            &["3/16", "-3/8", "-3/64", "3/32"],
            &["5/16", "-3/8", "0", "-3/32"],
            &["3/16", "1/8", "3/64", "1/32"],
            &["-3/32", "0", "-3/128", "0"],
        ],
        sum: "0",
    },
    phi: &[
        &[(-1, &["1", "3", "2"]), (0, &["1", "-3", "2"])],
        &[(0, &["0", "4", "-4"])],
    ],
    phi_hat0: &["1/3", "2/3"],
    phi_dual_hat0: &["1", "1"],
    sum_rules: 3,
    jets_primal: &[
        &[("1", "0"), ("1", "0")],
        &[("0", "0"), ("0", "1/2")],
        &[("0", "0"), ("-1/4", "0")],
    ],
    jets_dual: &[
        &[("1/3", "0"), ("2/3", "0")],
        &[("0", "0"), ("0", "1/3")],
        &[("1/30", "0"), ("-1/5", "0")],
    ],
    scaling_gens: &[
        ScalingGenDef {
            name: "phiL",
            bc: false,
            combo: &[(0, &["1", "0"])],
            ts_gens: &[(0, "1")],
            ts_phi: &[(0, &["0", "3/8"]), (1, &["0", "-1/8"])],
        },
        ScalingGenDef {
            name: "phiLbc",
            bc: true,
            combo: &[(0, &["0", "1"])],
            ts_gens: &[(1, "3/4")],
            ts_phi: &[(1, &["1", "3/4"])],
        },
    ],
    wavelet_gens: &[
        WaveletGenDef {
            name: "psiL",
            bc: false,
            ts_gens: &[(0, "1"), (1, "-9/16")],
            ts_phi: &[(1, &["3/4", "-1/16"])],
        },
        WaveletGenDef {
            name: "psiLbc",
            bc: true,
            ts_gens: &[(1, "1")],
            ts_phi: &[
                (1, &["-2121/512", "657/4096"]),
                (2, &["3877/1024", "-4023/4096"]),
            ],
        },
    ],
    reflect_phi: &[(0, 0, "1"), (1, -1, "1")],
    aliases: &[((0, 1), 1)],
    phi_x: LayoutDef {
        left: &[1],
        k_lo: 1,
        k_hi_minus: 1,
        right_bc: &[],
        right_free: None,
    },
    phi_y: LayoutDef {
        left: &[1],
        k_lo: 1,
        k_hi_minus: 1,
        right_bc: &[],
        right_free: Some((0, "1")),
    },
    psi_x: LayoutDef {
        left: &[1],
        k_lo: 1,
        k_hi_minus: 1,
        right_bc: &[(1, "1")],
        right_free: None,
    },
    psi_y: LayoutDef {
        left: &[1],
        k_lo: 1,
        k_hi_minus: 1,
        right_bc: &[],
        right_free: Some((0, "1")),
    },
};

// ---------------------------------------------------------------------------
// hmt: Hermite cubic two-component family
// ---------------------------------------------------------------------------

pub(super) const HMT: FamilyDef = FamilyDef {
    name: "hmt",
    r: 2,
    min_level: 2,
    mask_a: MaskDef {
        lo: -1,
        taps: &[
            &["1/4", "3/8", "-1/16", "-1/16"],
            &["1/2", "0", "0", "1/4"],
            &["1/4", "-3/8", "1/16", "-1/16"],
        ],
        sum: "9/8",
    },
    mask_b: MaskDef {
        lo: -2,
        taps: &[
            &["0", "0", "2/97", "24/679"],
            &["-1/2", "-15/4", "77/1164", "2921/2716"],
            &["1", "0", "0", "1"],
            &["-1/2", "15/4", "-77/1164", "2921/2716"],
            &["0", "0", "-2/97", "24/679"],
        ],
        sum: "625/194",
    },
    mask_a_dual: MaskDef {
        lo: -4,
        taps: &[
            &["-13/2432", "-91/29184", "3/152", "7/608"],
            &["39/2432", "13/3648", "-9/152", "-1/76"],
            &["-1/12", "-1699/43776", "679/1216", "4225/14592"],
            &["569/2432", "647/10944", "-1965/1216", "-37/96"],
            &["2471/3648", "0", "0", "7291/7296"],
            &["569/2432", "-647/10944", "1965/1216", "-37/96"],
            &["-1/12", "1699/43776", "-679/1216", "4225/14592"],
            &["39/2432", "-13/3648", "9/152", "-1/76"],
            &["-13/2432", "91/29184", "-3/152", "7/608"],
        ],
        sum: "1097/608",
    },
    mask_b_dual: MaskDef {
        lo: -4,
        taps: &[
            &["-1/4864", "-7/58368", "0", "0"],
            &["3/4864", "1/7296", "0", "0"],
            &["1/24", "2161/87552", "-679/4864", "-4753/58368"],
            &["-611/4864", "-605/21888", "2037/4864", "679/7296"],
            &["1219/7296", "0", "0", "7469/29184"],
            &["-611/4864", "605/21888", "-2037/4864", "679/7296"],
            &["1/24", "-2161/87552", "679/4864", "-4753/58368"],
            &["3/4864", "-1/7296", "0", "0"],
            &["-1/4864", "7/58368", "0", "0"],
        ],
        sum: "679/2432",
    },
    phi: &[
        &[(-1, &["1", "0", "-3", "-2"]), (0, &["1", "0", "-3", "2"])],
        &[(-1, &["0", "1", "2", "1"]), (0, &["0", "1", "-2", "1"])],
    ],
    phi_hat0: &["1", "0"],
    phi_dual_hat0: &["1", "0"],
    sum_rules: 4,
    jets_primal: &[
        &[("1", "0"), ("0", "0")],
        &[("0", "0"), ("0", "1")],
        &[("0", "0"), ("0", "0")],
        &[("0", "0"), ("0", "0")],
    ],
    jets_dual: &[
        &[("1", "0"), ("0", "0")],
        &[("0", "0"), ("0", "1/15")],
        &[("-2/15", "0"), ("0", "0")],
        &[("0", "0"), ("0", "-2/105")],
    ],
    scaling_gens: &[
        ScalingGenDef {
            name: "phiL",
            bc: false,
            combo: &[(0, &["1", "0"])],
            ts_gens: &[(0, "1")],
            ts_phi: &[(1, &["1/2", "-3/4"])],
        },
        ScalingGenDef {
            name: "phiLbc",
            bc: true,
            combo: &[(0, &["0", "1"])],
            ts_gens: &[(1, "1/2")],
            ts_phi: &[(1, &["1/8", "-1/8"])],
        },
    ],
    wavelet_gens: &[
        WaveletGenDef {
            name: "psiL",
            bc: false,
            ts_gens: &[(0, "1"), (1, "-27/4")],
            ts_phi: &[
                (1, &["4139/26352", "215/144"]),
                (2, &["-623/6588", "-119/1098"]),
                (3, &["0", "27/122"]),
            ],
        },
        WaveletGenDef {
            name: "psiLbc1",
            bc: true,
            ts_gens: &[(1, "-21/2")],
            ts_phi: &[
                (1, &["17/24", "-5847/488"]),
                (2, &["115/366", "233/61"]),
                (3, &["-9/61", "0"]),
            ],
        },
        WaveletGenDef {
            name: "psiLbc2",
            bc: true,
            ts_gens: &[(1, "93/16")],
            ts_phi: &[
                (1, &["-235/2112", "30351/3904"]),
                (2, &["8527/32208", "3571/488"]),
                (3, &["-428/671", "195/44"]),
            ],
        },
        WaveletGenDef {
            name: "psiLbc3",
            bc: true,
            ts_gens: &[(1, "1")],
            ts_phi: &[
                (1, &["-41/144", "-121/488"]),
                (2, &["341/2196", "-1987/732"]),
                (3, &["45/976", "0"]),
            ],
        },
    ],
    reflect_phi: &[(0, 0, "1"), (1, 0, "-1")],
    aliases: &[],
    phi_x: LayoutDef {
        left: &[1],
        k_lo: 1,
        k_hi_minus: 1,
        right_bc: &[(1, "-1")],
        right_free: None,
    },
    phi_y: LayoutDef {
        left: &[1],
        k_lo: 1,
        k_hi_minus: 1,
        right_bc: &[(1, "-1")],
        right_free: Some((0, "1")),
    },
    psi_x: LayoutDef {
        left: &[1, 2, 3],
        k_lo: 2,
        k_hi_minus: 2,
        right_bc: &[(1, "1"), (2, "1"), (3, "1")],
        right_free: None,
    },
    psi_y: LayoutDef {
        left: &[1, 2, 3],
        k_lo: 2,
        k_hi_minus: 2,
        right_bc: &[(1, "1"), (2, "1")],
        right_free: Some((0, "1")),
    },
};

// ---------------------------------------------------------------------------
// r3: cubic three-component family with sr(a) = 4
// ---------------------------------------------------------------------------

pub(super) const R3: FamilyDef = FamilyDef {
    name: "r3",
    r: 3,
    min_level: 1,
    mask_a: MaskDef {
        lo: -2,
        taps: &[
            &["0", "1/32", "0", "0", "0", "0", "0", "0", "0"],
            &["-1/32", "0", "5/32", "0", "0", "0", "0", "0", "0"],
            &["1/2", "5/32", "0", "0", "15/32", "1/2", "0", "-5/32", "0"],
            &["-1/32", "0", "1/32", "9/32", "0", "-5/32", "9/32", "1/2", "15/32"],
        ],
        sum: "3",
    },
    mask_b: MaskDef {
        lo: -2,
        taps: &[
            &["0", "1/64", "-125/6032", "0", "0", "0", "0", "0", "0"],
            &[
                "-4335/24128",
                "365/2262",
                "-13453/72384",
                "-1/4",
                "13/36",
                "-11/18",
                "0",
                "0",
                "0",
            ],
            &[
                "2703/6032",
                "-13453/72384",
                "365/2262",
                "0",
                "11/18",
                "-13/36",
                "0",
                "1/64",
                "1/8",
            ],
            &[
                "-4335/24128",
                "-125/6032",
                "1/64",
                "1/4",
                "0",
                "0",
                "-27/64",
                "1/8",
                "1/64",
            ],
        ],
        sum: "-2679/24128",
    },
    mask_a_dual: MaskDef {
        lo: -2,
        taps: &[
            &[
                "-33/512",
                "47/512",
                "7/64",
                "11/3392",
                "-47/10176",
                "-7/1272",
                "1375/461312",
                "-5875/1383936",
                "-875/172992",
            ],
            &[
                "-17/256",
                "-209/512",
                "259/512",
                "17/5088",
                "209/10176",
                "-259/10176",
                "125/40704",
                "26125/1383936",
                "-32375/1383936",
            ],
            &[
                "85/128",
                "259/512",
                "-209/512",
                "-211337/4151808",
                "1032671/4151808",
                "161873/259488",
                "34211/1037952",
                "-371405/4151808",
                "193255/4151808",
            ],
            &[
                "-17/256",
                "7/64",
                "47/512",
                "2775/13568",
                "193255/4151808",
                "-371405/4151808",
                "2775/13568",
                "161873/259488",
                "1032671/4151808",
            ],
            &[
                "-33/512",
                "0",
                "0",
                "34211/1037952",
                "-32375/1383936",
                "26125/1383936",
                "-211337/4151808",
                "-259/10176",
                "209/10176",
            ],
            &[
                "0",
                "0",
                "0",
                "125/40704",
                "-875/172992",
                "-5875/1383936",
                "17/5088",
                "-7/1272",
                "-47/10176",
            ],
            &[
                "0",
                "0",
                "0",
                "1375/461312",
                "0",
                "0",
                "11/3392",
                "0",
                "0",
            ],
        ],
        sum: "3",
    },
    mask_b_dual: MaskDef {
        lo: -2,
        taps: &[
            &[
                "4147/57664",
                "-17719/172992",
                "-2639/21624",
                "33/901",
                "-47/901",
                "-56/901",
                "0",
                "0",
                "0",
            ],
            &[
                "377/5088",
                "78793/172992",
                "-97643/172992",
                "2/53",
                "209/901",
                "-259/901",
                "0",
                "0",
                "0",
            ],
            &[
                "16211/43248",
                "-97643/172992",
                "78793/172992",
                "0",
                "259/901",
                "-209/901",
                "-128/477",
                "29/53",
                "12/53",
            ],
            &[
                "377/5088",
                "-2639/21624",
                "-17719/172992",
                "-2/53",
                "56/901",
                "47/901",
                "-482/477",
                "12/53",
                "29/53",
            ],
            &[
                "4147/57664",
                "0",
                "0",
                "-33/901",
                "0",
                "0",
                "-128/477",
                "0",
                "0",
            ],
        ],
        sum: "0",
    },
    phi: &[
        &[
            (-1, &["8/5", "44/5", "72/5", "36/5"]),
            (0, &["8/5", "-44/5", "72/5", "-36/5"]),
        ],
        &[(0, &["0", "72/5", "-36", "108/5"])],
        &[(0, &["0", "-36/5", "144/5", "-108/5"])],
    ],
    phi_hat0: &["2/5", "3/5", "3/5"],
    phi_dual_hat0: &["5/8", "5/8", "5/8"],
    sum_rules: 4,
    jets_primal: &[
        &[("5/8", "0"), ("5/8", "0"), ("5/8", "0")],
        &[("0", "0"), ("0", "5/24"), ("0", "5/12")],
        &[("0", "0"), ("-5/72", "0"), ("-5/18", "0")],
        &[("0", "0"), ("0", "-5/216"), ("0", "-5/27")],
    ],
    jets_dual: &[
        &[("2/5", "0"), ("3/5", "0"), ("3/5", "0")],
        &[("0", "0"), ("0", "3/25"), ("0", "12/25")],
        &[("-2/75", "0"), ("0", "0"), ("-9/25", "0")],
        &[("0", "0"), ("0", "6/175"), ("0", "-48/175")],
    ],
    scaling_gens: &[
        ScalingGenDef {
            name: "phiL",
            bc: false,
            combo: &[(0, &["5/8", "0", "0"])],
            ts_gens: &[(0, "1")],
            ts_phi: &[(0, &["0", "25/128", "0"]), (1, &["-5/128", "0", "5/128"])],
        },
        ScalingGenDef {
            name: "phiLbc1",
            bc: true,
            combo: &[(0, &["0", "1", "0"])],
            ts_gens: &[(1, "15/16"), (2, "1")],
            ts_phi: &[(1, &["9/16", "0", "-5/16"])],
        },
        ScalingGenDef {
            name: "phiLbc2",
            bc: true,
            combo: &[(0, &["0", "0", "1"])],
            ts_gens: &[(1, "-5/16")],
            ts_phi: &[(1, &["9/16", "1", "15/16"])],
        },
    ],
    wavelet_gens: &[
        WaveletGenDef {
            name: "psiL",
            bc: false,
            ts_gens: &[(0, "1"), (1, "-182143/577558"), (2, "-13249/577558")],
            ts_phi: &[(1, &["3245513/4620464", "-20201527/62376264", "-900809/62376264"])],
        },
        WaveletGenDef {
            name: "psiLbc",
            bc: true,
            ts_gens: &[(1, "819/3200000"), (2, "-40281/30800000")],
            ts_phi: &[
                (1, &["703/3200000", "113269/92400000", "58049/147840000"]),
                (2, &["-47/70000", "-29/56250", "619/2475000"]),
            ],
        },
        // ψ³ is supported in [0,1] and vanishes at both endpoints, so its
        // shift-0 translate belongs to every level; without it the two-scale
        // dimension count is short by one per level.
        WaveletGenDef {
            name: "psi3zero",
            bc: true,
            ts_gens: &[],
            ts_phi: &[
                (0, &["0", "1/32", "1/4"]),
                (1, &["-27/32", "1/4", "1/32"]),
            ],
        },
    ],
    reflect_phi: &[(0, 0, "1"), (2, -1, "1"), (1, -1, "1")],
    aliases: &[((0, 1), 1), ((0, 2), 2)],
    phi_x: LayoutDef {
        left: &[1, 2],
        k_lo: 1,
        k_hi_minus: 1,
        right_bc: &[],
        right_free: None,
    },
    phi_y: LayoutDef {
        left: &[1, 2],
        k_lo: 1,
        k_hi_minus: 1,
        right_bc: &[],
        right_free: Some((0, "1")),
    },
    psi_x: LayoutDef {
        left: &[1, 2],
        k_lo: 1,
        k_hi_minus: 1,
        right_bc: &[(1, "1")],
        right_free: None,
    },
    psi_y: LayoutDef {
        left: &[1, 2],
        k_lo: 1,
        k_hi_minus: 1,
        right_bc: &[],
        right_free: Some((0, "1")),
    },
};
