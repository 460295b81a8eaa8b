//! Catalog of four-dimensional Lie algebras and builder families for
//! generalised Einstein structures.
//!
//! The catalog has two halves. [`table_entries`] lists every四 real
//! four-dimensional Lie algebra by name, encodes its bracket through the
//! exterior differentials of the dual basis, and records structural metadata:
//! unimodularity, the isomorphism classes of its unimodular codimension one
//! ideals, the class of its commutator ideal, and whether a generalised
//! Lorentzian Einstein structure with zero divergence exists on it (see
//! [`GeFlag`]). [`families`] lists parametrised builders that produce
//! concrete generalised Einstein problems: classified solution families in
//! several signatures, reductive and Heisenberg examples, and a handful of
//! fixed illustrative structures. Builders validate their parameter maps
//! strictly: unknown names, out-of-domain values and attempts to supply
//! derived quantities are rejected with typed errors.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::einstein::{Divergence, GEProblem};
use crate::error::{Error, Result};
use crate::lie::{basis_vector, three_form, KForm, LieAlgebra, Subspace};
use crate::metric::ScalarProduct;
use crate::normal_form::{l1, l3, m3, m4};

/// Parameter assignment for a catalog entry or builder family.
pub type ParamMap = BTreeMap<String, f64>;

/// Tolerance carried by problems produced from the catalog.
const TOL: f64 = crate::DEFAULT_TOL;

/// Existence marker for generalised Lorentzian Einstein structures with zero
/// divergence on a given Lie algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeFlag {
    /// A structure with non-degenerate commutator ideal exists.
    DoubleCheck,
    /// A structure exists, but every one has degenerate commutator ideal.
    SingleCheck,
    /// No structure exists at all.
    Cross,
    /// No structure with non-degenerate commutator ideal exists; the
    /// degenerate case is not settled by the flag.
    Dash,
}

impl GeFlag {
    pub fn symbol(self) -> &'static str {
        match self {
            GeFlag::DoubleCheck => "✓✓",
            GeFlag::SingleCheck => "✓",
            GeFlag::Cross => "×",
            GeFlag::Dash => "-",
        }
    }
}

impl std::fmt::Display for GeFlag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One named Lie algebra of the four-dimensional classification.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    /// Canonical ASCII name, e.g. `"A4,6^{a,b}"` or `"e(2)+R"`.
    pub name: &'static str,
    /// Alternative spellings accepted by [`find_entry`].
    pub aliases: &'static [&'static str],
    /// Differentials `(de^1, ..., de^4)` of the dual basis, for display.
    pub differentials: &'static str,
    /// Human-readable parameter domain, when the entry is a family.
    pub parameter_domain: Option<&'static str>,
    /// Parameter names with representative in-domain values.
    pub parameters: &'static [(&'static str, f64)],
    pub unimodular: bool,
    /// Isomorphism classes of the unimodular codimension one ideals.
    pub codim1_ideals: &'static [&'static str],
    /// Isomorphism class of the commutator ideal (at generic parameters).
    pub commutator_label: &'static str,
    pub ge_flag: GeFlag,
    /// Parameter constraint under which the flag applies, when not all of
    /// the entry's domain.
    pub ge_flag_note: Option<&'static str>,
}

/// Builds a Lie algebra from the exterior differentials of its dual basis.
/// `terms` lists `(k, i, j, a)` with `i < j`, one per summand `a e^{ij}` of
/// `d e^k`. Since `d e^k (e_i, e_j) = -e^k([e_i, e_j])`, the structure
/// constant of `e_k` in `[e_i, e_j]` is `-a`.
pub fn algebra_from_differentials(
    dim: usize,
    terms: &[(usize, usize, usize, f64)],
) -> Result<LieAlgebra> {
    let entries: Vec<(usize, usize, usize, f64)> = terms
        .iter()
        .filter(|&&(_, _, _, a)| a != 0.0)
        .map(|&(k, i, j, a)| (i, j, k, -a))
        .collect();
    LieAlgebra::new(dim, &entries)
}

const TABLE: &[CatalogEntry] = &[
    // Unimodular.
    CatalogEntry {
        name: "so(3)+R",
        aliases: &[],
        differentials: "(e23, -e13, e12, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: true,
        codim1_ideals: &["so(3)"],
        commutator_label: "so(3)",
        ge_flag: GeFlag::DoubleCheck,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "so(2,1)+R",
        aliases: &[],
        differentials: "(e23, e13, e12, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: true,
        codim1_ideals: &["so(2,1)"],
        commutator_label: "so(2,1)",
        ge_flag: GeFlag::DoubleCheck,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "e(2)+R",
        aliases: &[],
        differentials: "(e23, -e13, 0, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: true,
        codim1_ideals: &["R^3", "e(2)"],
        commutator_label: "R^2",
        ge_flag: GeFlag::DoubleCheck,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "e(1,1)+R",
        aliases: &[],
        differentials: "(e23, e13, 0, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: true,
        codim1_ideals: &["R^3", "e(1,1)"],
        commutator_label: "R^2",
        ge_flag: GeFlag::DoubleCheck,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "h3+R",
        aliases: &[],
        differentials: "(e23, 0, 0, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: true,
        codim1_ideals: &["R^3", "h_3"],
        commutator_label: "R^1",
        ge_flag: GeFlag::SingleCheck,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "R^4",
        aliases: &[],
        differentials: "(0, 0, 0, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: true,
        codim1_ideals: &["R^3"],
        commutator_label: "0",
        ge_flag: GeFlag::DoubleCheck,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "A4,1",
        aliases: &[],
        differentials: "(e24, e34, 0, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: true,
        codim1_ideals: &["R^3", "h_3"],
        commutator_label: "R^2",
        ge_flag: GeFlag::SingleCheck,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "A4,2^-2",
        aliases: &[],
        differentials: "(-2 e14, e24 + e34, e34, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: true,
        codim1_ideals: &["R^3"],
        commutator_label: "R^3",
        ge_flag: GeFlag::Cross,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "A4,5^{a,-(a+1)}",
        aliases: &[],
        differentials: "(e14, a e24, -(a+1) e34, 0)",
        parameter_domain: Some("-1 < alpha <= -1/2"),
        parameters: &[("alpha", -0.5)],
        unimodular: true,
        codim1_ideals: &["R^3"],
        commutator_label: "R^3",
        ge_flag: GeFlag::Cross,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "A4,6^{a,-a/2}",
        aliases: &[],
        differentials: "(a e14, -a/2 e24 + e34, -a/2 e34 - e24, 0)",
        parameter_domain: Some("alpha > 0"),
        parameters: &[("alpha", 1.0)],
        unimodular: true,
        codim1_ideals: &["R^3"],
        commutator_label: "R^3",
        ge_flag: GeFlag::Cross,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "A4,8",
        aliases: &[],
        differentials: "(e23, e24, -e34, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: true,
        codim1_ideals: &["h_3"],
        commutator_label: "h_3",
        ge_flag: GeFlag::Dash,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "A4,10",
        aliases: &[],
        differentials: "(e23, e34, -e24, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: true,
        codim1_ideals: &["h_3"],
        commutator_label: "h_3",
        ge_flag: GeFlag::Dash,
        ge_flag_note: None,
    },
    // Non-unimodular.
    CatalogEntry {
        name: "aff_R+R^2",
        aliases: &[],
        differentials: "(e14, 0, 0, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: false,
        codim1_ideals: &["R^3"],
        commutator_label: "R^1",
        ge_flag: GeFlag::Cross,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "r3+R",
        aliases: &[],
        differentials: "(e14 + e24, e24, 0, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: false,
        codim1_ideals: &["R^3"],
        commutator_label: "R^2",
        ge_flag: GeFlag::Cross,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "r3,mu+R",
        aliases: &[],
        differentials: "(e14, mu e24, 0, 0)",
        parameter_domain: Some("-1 < mu <= 1, mu != 0"),
        parameters: &[("mu", 0.5)],
        unimodular: false,
        codim1_ideals: &["R^3"],
        commutator_label: "R^2",
        ge_flag: GeFlag::Cross,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "r'3,mu+R",
        aliases: &[],
        differentials: "(mu e14 + e24, -e14 + mu e24, 0, 0)",
        parameter_domain: Some("mu > 0"),
        parameters: &[("mu", 1.0)],
        unimodular: false,
        codim1_ideals: &["R^3"],
        commutator_label: "R^2",
        ge_flag: GeFlag::DoubleCheck,
        ge_flag_note: Some("only for mu = 1"),
    },
    CatalogEntry {
        name: "A4,2^a",
        aliases: &[],
        differentials: "(a e14, e24 + e34, e34, 0)",
        parameter_domain: Some("alpha != 0, -2"),
        parameters: &[("alpha", 1.0)],
        unimodular: false,
        codim1_ideals: &["R^3"],
        commutator_label: "R^3",
        ge_flag: GeFlag::Cross,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "A4,3",
        aliases: &[],
        differentials: "(e14, e34, 0, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: false,
        codim1_ideals: &["R^3"],
        commutator_label: "R^2",
        ge_flag: GeFlag::Cross,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "A4,4",
        aliases: &[],
        differentials: "(e14 + e24, e24 + e34, e34, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: false,
        codim1_ideals: &["R^3"],
        commutator_label: "R^3",
        ge_flag: GeFlag::Cross,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "A4,5^{a,b}",
        aliases: &[],
        differentials: "(e14, a e24, b e34, 0)",
        parameter_domain: Some("-1 < alpha <= beta <= 1, alpha beta != 0, beta != -(alpha+1)"),
        parameters: &[("alpha", 0.5), ("beta", 1.0)],
        unimodular: false,
        codim1_ideals: &["R^3"],
        commutator_label: "R^3",
        ge_flag: GeFlag::Cross,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "A4,6^{a,b}",
        aliases: &[],
        differentials: "(a e14, b e24 + e34, b e34 - e24, 0)",
        parameter_domain: Some("alpha > 0, beta != -alpha/2"),
        parameters: &[("alpha", 1.0), ("beta", 0.0)],
        unimodular: false,
        codim1_ideals: &["R^3"],
        commutator_label: "R^3",
        ge_flag: GeFlag::DoubleCheck,
        ge_flag_note: Some("only for alpha^2 + 2 beta^2 = 1"),
    },
    CatalogEntry {
        name: "A4,7",
        aliases: &[],
        differentials: "(2 e14 + e23, e24 + e34, e34, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: false,
        codim1_ideals: &["h_3"],
        commutator_label: "h_3",
        ge_flag: GeFlag::Dash,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "A4,9^a",
        aliases: &["A4,9"],
        differentials: "((a+1) e14 + e23, e24, a e34, 0)",
        parameter_domain: Some("-1 < alpha <= 1"),
        parameters: &[("alpha", 0.5)],
        unimodular: false,
        codim1_ideals: &["h_3"],
        commutator_label: "h_3",
        ge_flag: GeFlag::Dash,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "A4,11^a",
        aliases: &[],
        differentials: "(2a e14 + e23, a e24 + e34, a e34 - e24, 0)",
        parameter_domain: Some("alpha > 0"),
        parameters: &[("alpha", 1.0)],
        unimodular: false,
        codim1_ideals: &["h_3"],
        commutator_label: "h_3",
        ge_flag: GeFlag::Dash,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "aff_C",
        aliases: &[],
        differentials: "(e14 + e23, e24 - e13, 0, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: false,
        codim1_ideals: &["e(2)"],
        commutator_label: "R^2",
        ge_flag: GeFlag::Dash,
        ge_flag_note: None,
    },
    CatalogEntry {
        name: "aff_R+aff_R",
        aliases: &["aff_RR"],
        differentials: "(e12, 0, e34, 0)",
        parameter_domain: None,
        parameters: &[],
        unimodular: false,
        codim1_ideals: &["e(1,1)"],
        commutator_label: "R^2",
        ge_flag: GeFlag::Dash,
        ge_flag_note: None,
    },
];

/// All entries of the four-dimensional classification.
pub fn table_entries() -> &'static [CatalogEntry] {
    TABLE
}

/// Normalises a catalog name for lookup: lowercased, Unicode sub- and
/// superscripts folded to digits, blackboard letters to plain letters, Greek
/// letters spelled out, primes kept, everything else dropped.
fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        match c {
            '₀' | '⁰' => out.push('0'),
            '₁' | '¹' => out.push('1'),
            '₂' | '²' => out.push('2'),
            '₃' | '³' => out.push('3'),
            '₄' | '⁴' => out.push('4'),
            '₅' | '⁵' => out.push('5'),
            '₆' | '⁶' => out.push('6'),
            '₇' | '⁷' => out.push('7'),
            '₈' | '⁸' => out.push('8'),
            '₉' | '⁹' => out.push('9'),
            'ℝ' => out.push('r'),
            'ℂ' => out.push('c'),
            'α' => out.push('a'),
            'β' => out.push('b'),
            'μ' => out.push_str("mu"),
            '\'' | '′' => out.push('p'),
            c if c.is_ascii_alphanumeric() => out.push(c.to_ascii_lowercase()),
            _ => {}
        }
    }
    out
}

/// Looks an entry up by name; Unicode spellings and the recorded aliases are
/// accepted, e.g. `"h₃⊕ℝ"` for `"h3+R"` or `"aff_RR"` for `"aff_R+aff_R"`.
pub fn find_entry(name: &str) -> Option<&'static CatalogEntry> {
    let wanted = slug(name);
    TABLE.iter().find(|entry| {
        slug(entry.name) == wanted || entry.aliases.iter().any(|a| slug(a) == wanted)
    })
}

/// Resolves a name to an entry plus parameters. On top of [`find_entry`]
/// this understands fixed-parameter spellings of family rows, currently
/// `"A4,9^0"` for the trace-degenerate member of `"A4,9^a"`.
pub fn lookup_algebra(name: &str) -> Result<(&'static CatalogEntry, ParamMap)> {
    if let Some(entry) = find_entry(name) {
        return Ok((entry, entry.default_params()));
    }
    if slug(name) == "a490" {
        let entry = find_entry("A4,9^a").expect("table row exists");
        let mut params = ParamMap::new();
        params.insert("alpha".to_string(), 0.0);
        return Ok((entry, params));
    }
    Err(Error::UnknownEntry {
        name: name.to_string(),
    })
}

impl CatalogEntry {
    /// The representative parameter assignment recorded in the table.
    pub fn default_params(&self) -> ParamMap {
        self.parameters
            .iter()
            .map(|&(name, value)| (name.to_string(), value))
            .collect()
    }

    /// The Lie algebra at the representative parameters.
    pub fn algebra(&self) -> LieAlgebra {
        self.algebra_at(&self.default_params())
            .expect("representative parameters lie in the domain")
    }

    /// The Lie algebra at the given parameters, after domain validation.
    pub fn algebra_at(&self, params: &ParamMap) -> Result<LieAlgebra> {
        let mut p = Params::new(self.name, params);
        let terms = table_differentials(self.name, &mut p)?;
        p.finish()?;
        algebra_from_differentials(4, &terms)
    }

    /// Commutator ideal class, honouring parameter-dependent degenerations.
    pub fn commutator_label_at(&self, params: &ParamMap) -> &'static str {
        if self.name == "A4,9^a" {
            let alpha = params.get("alpha").copied().unwrap_or(0.5);
            if alpha == 0.0 {
                return "R^2";
            }
        }
        self.commutator_label
    }

    /// Whether the existence flag applies at the given parameters. Entries
    /// without a flag note apply everywhere in their domain.
    pub fn ge_flag_applies(&self, params: &ParamMap) -> bool {
        match self.name {
            "r'3,mu+R" => {
                let mu = params.get("mu").copied().unwrap_or(1.0);
                (mu - 1.0).abs() < 1e-12
            }
            "A4,6^{a,b}" => {
                let alpha = params.get("alpha").copied().unwrap_or(1.0);
                let beta = params.get("beta").copied().unwrap_or(0.0);
                (alpha * alpha + 2.0 * beta * beta - 1.0).abs() < 1e-12
            }
            _ => true,
        }
    }

    /// Explicit codimension one ideals realising the classes recorded in
    /// `codim1_ideals`, in the same order.
    pub fn ideal_witnesses(&self) -> Vec<(&'static str, Subspace)> {
        let e = |i: usize| basis_vector(4, i - 1);
        let span = |vs: &[DVector<f64>]| Subspace::span(4, vs);
        let first_three = || span(&[e(1), e(2), e(3)]);
        match self.name {
            "so(3)+R" => vec![("so(3)", first_three())],
            "so(2,1)+R" => vec![("so(2,1)", first_three())],
            "e(2)+R" => vec![
                ("R^3", span(&[e(1), e(2), e(4)])),
                ("e(2)", first_three()),
            ],
            "e(1,1)+R" => vec![
                ("R^3", span(&[e(1), e(2), e(4)])),
                ("e(1,1)", first_three()),
            ],
            "h3+R" => vec![
                ("R^3", span(&[e(1), e(2), e(4)])),
                ("h_3", first_three()),
            ],
            "A4,1" => vec![
                ("R^3", first_three()),
                ("h_3", span(&[e(1), e(2), e(3) + e(4)])),
            ],
            "aff_C" => vec![("e(2)", first_three())],
            "aff_R+aff_R" => vec![("e(1,1)", span(&[e(1), e(3), e(2) - e(4)]))],
            _ => {
                // Remaining rows list exactly one class, realised by the
                // span of the first three basis vectors.
                vec![(self.codim1_ideals[0], first_three())]
            }
        }
    }
}

/// Differential terms `(k, i, j, coeff)` of each table row, with parameters
/// consumed from `p` and validated against the printed domain.
fn table_differentials(
    name: &'static str,
    p: &mut Params,
) -> Result<Vec<(usize, usize, usize, f64)>> {
    let bad = |param: &str, reason: &str| -> Error {
        Error::BadParameter {
            name: param.to_string(),
            reason: reason.to_string(),
        }
    };
    Ok(match name {
        "so(3)+R" => vec![(1, 2, 3, 1.0), (2, 1, 3, -1.0), (3, 1, 2, 1.0)],
        "so(2,1)+R" => vec![(1, 2, 3, 1.0), (2, 1, 3, 1.0), (3, 1, 2, 1.0)],
        "e(2)+R" => vec![(1, 2, 3, 1.0), (2, 1, 3, -1.0)],
        "e(1,1)+R" => vec![(1, 2, 3, 1.0), (2, 1, 3, 1.0)],
        "h3+R" => vec![(1, 2, 3, 1.0)],
        "R^4" => vec![],
        "A4,1" => vec![(1, 2, 4, 1.0), (2, 3, 4, 1.0)],
        "A4,2^-2" => vec![
            (1, 1, 4, -2.0),
            (2, 2, 4, 1.0),
            (2, 3, 4, 1.0),
            (3, 3, 4, 1.0),
        ],
        "A4,5^{a,-(a+1)}" => {
            let alpha = p.take_or("alpha", -0.5);
            if !(-1.0 < alpha && alpha <= -0.5) {
                return Err(bad("alpha", "must satisfy -1 < alpha <= -1/2"));
            }
            vec![(1, 1, 4, 1.0), (2, 2, 4, alpha), (3, 3, 4, -(alpha + 1.0))]
        }
        "A4,6^{a,-a/2}" => {
            let alpha = p.take_or("alpha", 1.0);
            if alpha <= 0.0 {
                return Err(bad("alpha", "must be positive"));
            }
            vec![
                (1, 1, 4, alpha),
                (2, 2, 4, -alpha / 2.0),
                (2, 3, 4, 1.0),
                (3, 3, 4, -alpha / 2.0),
                (3, 2, 4, -1.0),
            ]
        }
        "A4,8" => vec![(1, 2, 3, 1.0), (2, 2, 4, 1.0), (3, 3, 4, -1.0)],
        "A4,10" => vec![(1, 2, 3, 1.0), (2, 3, 4, 1.0), (3, 2, 4, -1.0)],
        "aff_R+R^2" => vec![(1, 1, 4, 1.0)],
        "r3+R" => vec![(1, 1, 4, 1.0), (1, 2, 4, 1.0), (2, 2, 4, 1.0)],
        "r3,mu+R" => {
            let mu = p.take_or("mu", 0.5);
            if !(-1.0 < mu && mu <= 1.0) || mu == 0.0 {
                return Err(bad("mu", "must satisfy -1 < mu <= 1, mu != 0"));
            }
            vec![(1, 1, 4, 1.0), (2, 2, 4, mu)]
        }
        "r'3,mu+R" => {
            let mu = p.take_or("mu", 1.0);
            if mu <= 0.0 {
                return Err(bad("mu", "must be positive"));
            }
            vec![
                (1, 1, 4, mu),
                (1, 2, 4, 1.0),
                (2, 1, 4, -1.0),
                (2, 2, 4, mu),
            ]
        }
        "A4,2^a" => {
            let alpha = p.take_or("alpha", 1.0);
            if alpha == 0.0 || alpha == -2.0 {
                return Err(bad("alpha", "must avoid 0 and -2"));
            }
            vec![
                (1, 1, 4, alpha),
                (2, 2, 4, 1.0),
                (2, 3, 4, 1.0),
                (3, 3, 4, 1.0),
            ]
        }
        "A4,3" => vec![(1, 1, 4, 1.0), (2, 3, 4, 1.0)],
        "A4,4" => vec![
            (1, 1, 4, 1.0),
            (1, 2, 4, 1.0),
            (2, 2, 4, 1.0),
            (2, 3, 4, 1.0),
            (3, 3, 4, 1.0),
        ],
        "A4,5^{a,b}" => {
            let alpha = p.take_or("alpha", 0.5);
            let beta = p.take_or("beta", 1.0);
            if !(-1.0 < alpha && alpha <= beta && beta <= 1.0) {
                return Err(bad("alpha", "must satisfy -1 < alpha <= beta <= 1"));
            }
            if alpha * beta == 0.0 {
                return Err(bad("alpha", "alpha beta must be nonzero"));
            }
            if beta == -(alpha + 1.0) {
                return Err(bad("beta", "beta = -(alpha+1) belongs to the unimodular row"));
            }
            vec![(1, 1, 4, 1.0), (2, 2, 4, alpha), (3, 3, 4, beta)]
        }
        "A4,6^{a,b}" => {
            let alpha = p.take_or("alpha", 1.0);
            let beta = p.take_or("beta", 0.0);
            if alpha <= 0.0 {
                return Err(bad("alpha", "must be positive"));
            }
            if beta == -alpha / 2.0 {
                return Err(bad("beta", "beta = -alpha/2 belongs to the unimodular row"));
            }
            vec![
                (1, 1, 4, alpha),
                (2, 2, 4, beta),
                (2, 3, 4, 1.0),
                (3, 3, 4, beta),
                (3, 2, 4, -1.0),
            ]
        }
        "A4,7" => vec![
            (1, 1, 4, 2.0),
            (1, 2, 3, 1.0),
            (2, 2, 4, 1.0),
            (2, 3, 4, 1.0),
            (3, 3, 4, 1.0),
        ],
        "A4,9^a" => {
            let alpha = p.take_or("alpha", 0.5);
            if !(-1.0 < alpha && alpha <= 1.0) {
                return Err(bad("alpha", "must satisfy -1 < alpha <= 1"));
            }
            vec![
                (1, 1, 4, alpha + 1.0),
                (1, 2, 3, 1.0),
                (2, 2, 4, 1.0),
                (3, 3, 4, alpha),
            ]
        }
        "A4,11^a" => {
            let alpha = p.take_or("alpha", 1.0);
            if alpha <= 0.0 {
                return Err(bad("alpha", "must be positive"));
            }
            vec![
                (1, 1, 4, 2.0 * alpha),
                (1, 2, 3, 1.0),
                (2, 2, 4, alpha),
                (2, 3, 4, 1.0),
                (3, 3, 4, alpha),
                (3, 2, 4, -1.0),
            ]
        }
        "aff_C" => vec![
            (1, 1, 4, 1.0),
            (1, 2, 3, 1.0),
            (2, 2, 4, 1.0),
            (2, 1, 3, -1.0),
        ],
        "aff_R+aff_R" => vec![(1, 1, 2, 1.0), (3, 3, 4, 1.0)],
        other => {
            return Err(Error::UnknownEntry {
                name: other.to_string(),
            })
        }
    })
}

/// Strict parameter reader: every supplied name must be consumed, missing
/// required names and out-of-domain values raise typed errors.
struct Params {
    family: &'static str,
    map: BTreeMap<String, f64>,
}

impl Params {
    fn new(family: &'static str, map: &ParamMap) -> Self {
        Self {
            family,
            map: map.clone(),
        }
    }

    fn take_or(&mut self, name: &str, default: f64) -> f64 {
        self.map.remove(name).unwrap_or(default)
    }

    fn require(&mut self, name: &str) -> Result<f64> {
        self.map.remove(name).ok_or_else(|| Error::MissingParameter {
            family: self.family.to_string(),
            name: name.to_string(),
        })
    }

    /// Collects `prefix1, prefix2, ...` as long as consecutive names exist.
    fn seq(&mut self, prefix: &str) -> Vec<f64> {
        let mut out = Vec::new();
        let mut i = 1usize;
        while let Some(v) = self.map.remove(&format!("{prefix}{i}")) {
            out.push(v);
            i += 1;
        }
        out
    }

    /// Rejects a name that callers must not supply (derived quantities).
    fn forbid(&mut self, name: &str, reason: &str) -> Result<()> {
        if self.map.remove(name).is_some() {
            return Err(Error::UnexpectedParameter {
                family: self.family.to_string(),
                name: name.to_string(),
                reason: reason.to_string(),
            });
        }
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        if let Some(name) = self.map.keys().next().cloned() {
            return Err(Error::UnexpectedParameter {
                family: self.family.to_string(),
                name,
                reason: "not a parameter of this family".to_string(),
            });
        }
        self.map.clear();
        Ok(())
    }
}

fn bad_param(name: &str, reason: &str) -> Error {
    Error::BadParameter {
        name: name.to_string(),
        reason: reason.to_string(),
    }
}

fn sign_param(name: &str, value: f64) -> Result<f64> {
    if value == 1.0 || value == -1.0 {
        Ok(value)
    } else {
        Err(bad_param(name, "must be 1 or -1"))
    }
}

fn dim_param(name: &str, value: f64) -> Result<usize> {
    if value.fract() != 0.0 || !(2.0..=64.0).contains(&value) {
        return Err(bad_param(name, "must be an integer dimension between 2 and 64"));
    }
    Ok(value as usize)
}

/// Checks `c1 >= c2 >= ... > 0`.
fn descending_positive(prefix: &str, values: &[f64]) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        if v <= 0.0 {
            return Err(bad_param(&format!("{prefix}{}", i + 1), "must be positive"));
        }
        if i > 0 && values[i - 1] < v {
            return Err(bad_param(
                &format!("{prefix}{}", i + 1),
                "sequence must be non-increasing",
            ));
        }
    }
    Ok(())
}

/// Almost Abelian algebra: the last basis vector acts on the span of the
/// first `n-1` by the matrix `f`, so `[e_n, e_i] = sum_j f_ji e_j`.
fn almost_abelian_algebra(f: &DMatrix<f64>) -> Result<LieAlgebra> {
    let m = f.nrows();
    let n = m + 1;
    let mut entries = Vec::new();
    for i in 0..m {
        for k in 0..m {
            let c = -f[(k, i)];
            if c != 0.0 {
                entries.push((i + 1, n, k + 1, c));
            }
        }
    }
    LieAlgebra::new(n, &entries)
}

/// Writes `block` into `target` with its upper-left corner at `(row, col)`.
fn embed(target: &mut DMatrix<f64>, row: usize, col: usize, block: &DMatrix<f64>) {
    for i in 0..block.nrows() {
        for j in 0..block.ncols() {
            target[(row + i, col + j)] = block[(i, j)];
        }
    }
}

/// `diag(L1(0, a_1), ..., L1(0, a_k), 0, ..., 0)` of the given size.
fn rotation_blocks(size: usize, spins: &[f64]) -> DMatrix<f64> {
    let mut f = DMatrix::zeros(size, size);
    for (idx, &a) in spins.iter().enumerate() {
        embed(&mut f, 2 * idx, 2 * idx, &l1(0.0, a));
    }
    f
}

/// Collects `v1 .. v_count` with default 0.
fn vector_params(p: &mut Params, prefix: &str, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|i| p.take_or(&format!("{prefix}{i}"), 0.0))
        .collect()
}

// ---------------------------------------------------------------------------
// Family builders.
// ---------------------------------------------------------------------------

fn build_riem_4d_i(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("riem.4d.i", params);
    let dv: Vec<f64> = (1..=4).map(|i| p.take_or(&format!("dv{i}"), 0.0)).collect();
    let dc: Vec<f64> = (1..=4).map(|i| p.take_or(&format!("dc{i}"), 0.0)).collect();
    p.finish()?;
    let lie = LieAlgebra::new(4, &[])?;
    let delta = Divergence::new(
        DVector::from_row_slice(&dv),
        DVector::from_row_slice(&dc),
    );
    GEProblem::new(
        lie,
        ScalarProduct::euclidean(4),
        KForm::zero(4, 3)?,
        delta,
        TOL,
    )
}

fn build_riem_4d_ii(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("riem.4d.ii", params);
    let a = p.take_or("a", 1.0);
    if a <= 0.0 {
        return Err(bad_param("a", "must be positive"));
    }
    let dv3 = p.take_or("dv3", 0.0);
    let dv4 = p.take_or("dv4", 0.0);
    let dc3 = p.take_or("dc3", 0.0);
    let dc4 = p.take_or("dc4", 0.0);
    for name in ["dv1", "dv2", "dc1", "dc2"] {
        p.forbid(name, "the divergence must annihilate e_1, e_2, e^1, e^2")?;
    }
    p.finish()?;
    let lie = LieAlgebra::new(4, &[(3, 1, 2, a), (3, 2, 1, -a)])?;
    let delta = Divergence::new(
        DVector::from_row_slice(&[0.0, 0.0, dv3, dv4]),
        DVector::from_row_slice(&[0.0, 0.0, dc3, dc4]),
    );
    GEProblem::new(
        lie,
        ScalarProduct::euclidean(4),
        KForm::zero(4, 3)?,
        delta,
        TOL,
    )
}

fn so3_r_brackets(a: f64, b: f64, eps: f64) -> Vec<(usize, usize, usize, f64)> {
    vec![
        (1, 2, 3, eps * a),
        (2, 3, 1, eps * a),
        (3, 1, 2, eps * a),
        (3, 4, 2, b),
        (4, 2, 3, b),
    ]
}

fn build_riem_4d_iii(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("riem.4d.iii", params);
    let a = p.take_or("a", 1.0);
    if a == 0.0 {
        return Err(bad_param("a", "must be nonzero"));
    }
    let b = p.take_or("b", 0.0);
    let eps = sign_param("eps", p.take_or("eps", 1.0))?;
    // The divergence satisfies delta(e_i) = -eps delta(e^i) on the compact
    // factor; it is parametrised by the covector components dc1..dc3 plus
    // free components dv4, dc4 on the flat factor.
    let dc1 = p.take_or("dc1", 0.0);
    let dc2 = p.take_or("dc2", 0.0);
    let dc3 = p.take_or("dc3", 0.0);
    let dv4 = p.take_or("dv4", 0.0);
    let dc4 = p.take_or("dc4", 0.0);
    p.finish()?;
    if b != 0.0 && (dc2 != 0.0 || dc3 != 0.0) {
        return Err(bad_param(
            "dc2",
            "for b != 0 the divergence must annihilate e_2, e_3, e^2, e^3",
        ));
    }
    let lie = LieAlgebra::new(4, &so3_r_brackets(a, b, eps))?;
    let delta = Divergence::new(
        DVector::from_row_slice(&[-eps * dc1, -eps * dc2, -eps * dc3, dv4]),
        DVector::from_row_slice(&[dc1, dc2, dc3, dc4]),
    );
    GEProblem::new(
        lie,
        ScalarProduct::euclidean(4),
        three_form(4, &[(1, 2, 3, a)])?,
        delta,
        TOL,
    )
}

fn build_aa_h0_riem(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("aa.H0.riem", params);
    let n = dim_param("n", p.take_or("n", 4.0))?;
    let spins = p.seq("a");
    p.finish()?;
    descending_positive("a", &spins)?;
    if 2 * spins.len() > n - 1 {
        return Err(bad_param("a1", "too many rotation blocks for the dimension"));
    }
    let f = rotation_blocks(n - 1, &spins);
    let mut diag = vec![1.0; n];
    diag[n - 1] = -1.0;
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&f)?,
        ScalarProduct::diagonal(&diag)?,
        KForm::zero(n, 3)?,
        TOL,
    )
}

/// The endomorphism of the Lorentzian classification case `1..=6`, acting on
/// an ideal with inner product `diag(-1, 1, ..., 1)`. `shear_sign` names the
/// sign parameter of case 5, which differs between families.
fn lorentzian_case_f(
    case: usize,
    p: &mut Params,
    shear_sign: &str,
) -> Result<DMatrix<f64>> {
    match case {
        1 => {
            let rho = p.take_or("rho", 1.0);
            p.forbid("n", "this case is three-dimensional")?;
            Ok(DMatrix::from_row_slice(2, 2, &[0.0, rho, rho, 0.0]))
        }
        2 => {
            let n = dim_param("n", p.take_or("n", 4.0))?;
            if n % 2 != 0 || n < 4 {
                return Err(bad_param("n", "must be even and at least 4"));
            }
            let sigma = p.take_or("sigma", 1.0);
            let spins = p.seq("a");
            descending_positive("a", &spins)?;
            if 3 + 2 * spins.len() > n - 1 {
                return Err(bad_param("a1", "too many rotation blocks for the dimension"));
            }
            let mut f = DMatrix::zeros(n - 1, n - 1);
            embed(&mut f, 0, 0, &m3(sigma));
            embed(&mut f, 3, 3, &rotation_blocks(n - 4, &spins));
            Ok(f)
        }
        3 => {
            let n = dim_param("n", p.take_or("n", 5.0))?;
            if n % 2 == 0 || n < 5 {
                return Err(bad_param("n", "must be odd and at least 5"));
            }
            let sigma = p.take_or("sigma", 1.0);
            let tau = p.take_or("tau", 0.0);
            if tau < 0.0 {
                return Err(bad_param("tau", "must be nonnegative"));
            }
            let spins = p.seq("a");
            descending_positive("a", &spins)?;
            if 4 + 2 * spins.len() > n - 1 {
                return Err(bad_param("a1", "too many rotation blocks for the dimension"));
            }
            let mut f = DMatrix::zeros(n - 1, n - 1);
            embed(&mut f, 0, 0, &m4(sigma, tau));
            embed(&mut f, 4, 4, &rotation_blocks(n - 5, &spins));
            Ok(f)
        }
        4 => {
            p.forbid("beta", "the rotation radius is derived from the other parameters")?;
            let alpha = p.take_or("alpha", 1.0);
            let spirals_re = p.seq("a");
            let spirals_im = p.seq("b");
            if spirals_re.len() != spirals_im.len() {
                return Err(bad_param(
                    "a1",
                    "the sequences a* and b* must have the same length",
                ));
            }
            descending_positive("b", &spirals_im)?;
            let stretches = p.seq("c");
            for w in stretches.windows(2) {
                if w[0] < w[1] {
                    return Err(bad_param("c1", "sequence must be non-increasing"));
                }
            }
            let sum_a: f64 = spirals_re.iter().map(|a| a * a).sum();
            let sum_c: f64 = stretches.iter().map(|c| c * c).sum();
            let beta = (alpha * alpha + sum_a + sum_c / 2.0).sqrt();
            if beta == 0.0 {
                return Err(bad_param(
                    "alpha",
                    "at least one of alpha, a*, c* must be nonzero",
                ));
            }
            let k = spirals_re.len();
            let s = stretches.len();
            let size = 2 + 2 * k + s;
            let mut f = DMatrix::zeros(size, size);
            embed(&mut f, 0, 0, &l1(alpha, beta));
            for i in 0..k {
                embed(&mut f, 2 + 2 * i, 2 + 2 * i, &l1(spirals_re[i], spirals_im[i]));
            }
            for (j, &c) in stretches.iter().enumerate() {
                f[(2 + 2 * k + j, 2 + 2 * k + j)] = c;
            }
            Ok(f)
        }
        5 => {
            let eps = sign_param(shear_sign, p.take_or(shear_sign, 1.0))?;
            let n = dim_param("n", p.take_or("n", 4.0))?;
            if n < 4 {
                return Err(bad_param("n", "must be at least 4"));
            }
            let v = vector_params(p, "v", n - 3);
            let spins = p.seq("a");
            descending_positive("a", &spins)?;
            if 2 * spins.len() > n - 3 {
                return Err(bad_param("a1", "too many rotation blocks for the dimension"));
            }
            let mut f = DMatrix::zeros(n - 1, n - 1);
            f[(0, 0)] = eps / 2.0;
            f[(0, 1)] = eps / 2.0;
            f[(1, 0)] = -eps / 2.0;
            f[(1, 1)] = -eps / 2.0;
            for (q, &vq) in v.iter().enumerate() {
                f[(0, 2 + q)] = vq;
                f[(1, 2 + q)] = -vq;
                f[(2 + q, 0)] = vq;
                f[(2 + q, 1)] = vq;
            }
            embed(&mut f, 2, 2, &rotation_blocks(n - 3, &spins));
            Ok(f)
        }
        6 => {
            let n = dim_param("n", p.take_or("n", 4.0))?;
            if n < 4 {
                return Err(bad_param("n", "must be at least 4"));
            }
            let v = vector_params(p, "v", n - 4);
            let spins = p.seq("a");
            descending_positive("a", &spins)?;
            if 2 * spins.len() > n - 4 {
                return Err(bad_param("a1", "too many rotation blocks for the dimension"));
            }
            let mut f = DMatrix::zeros(n - 1, n - 1);
            embed(&mut f, 0, 0, &l3(0.0));
            for (q, &vq) in v.iter().enumerate() {
                f[(0, 3 + q)] = vq;
                f[(2, 3 + q)] = -vq;
                f[(3 + q, 0)] = vq;
                f[(3 + q, 2)] = vq;
            }
            embed(&mut f, 3, 3, &rotation_blocks(n - 4, &spins));
            Ok(f)
        }
        _ => Err(bad_param("case", "must be between 1 and 7")),
    }
}

fn build_aa_h0_lor(case: usize, family: &'static str, params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new(family, params);
    let f = lorentzian_case_f(case, &mut p, "eps")?;
    p.finish()?;
    let n = f.nrows() + 1;
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&f)?,
        ScalarProduct::lorentzian_neg_first(n),
        KForm::zero(n, 3)?,
        TOL,
    )
}

fn build_aa_h0_lor_i(params: &ParamMap) -> Result<GEProblem> {
    build_aa_h0_lor(1, "aa.H0.lor.i", params)
}
fn build_aa_h0_lor_ii(params: &ParamMap) -> Result<GEProblem> {
    build_aa_h0_lor(2, "aa.H0.lor.ii", params)
}
fn build_aa_h0_lor_iii(params: &ParamMap) -> Result<GEProblem> {
    build_aa_h0_lor(3, "aa.H0.lor.iii", params)
}
fn build_aa_h0_lor_iv(params: &ParamMap) -> Result<GEProblem> {
    build_aa_h0_lor(4, "aa.H0.lor.iv", params)
}
fn build_aa_h0_lor_v(params: &ParamMap) -> Result<GEProblem> {
    build_aa_h0_lor(5, "aa.H0.lor.v", params)
}
fn build_aa_h0_lor_vi(params: &ParamMap) -> Result<GEProblem> {
    build_aa_h0_lor(6, "aa.H0.lor.vi", params)
}

/// Torsion data of the general odd-rotation family with nonzero three-form.
/// Returns `(f, H)` for the almost Abelian algebra with Lorentzian ideal of
/// dimension `n - 1`.
fn spiral_torsion_data(p: &mut Params) -> Result<(DMatrix<f64>, KForm)> {
    for name in ["rho", "rhotilde", "rho_tilde"] {
        p.forbid(name, "the scale rho is derived from the torsion data")?;
    }
    let n = dim_param("n", p.take_or("n", 5.0))?;
    if n < 4 {
        return Err(bad_param("n", "must be at least 4"));
    }
    let b = p.take_or("b", 1.0);
    let speeds = p.seq("c");
    descending_positive("c", &speeds)?;
    let k = speeds.len();
    if 2 * k > n - 4 {
        return Err(bad_param("c1", "too many rotation blocks for the dimension"));
    }
    let m = n - 4 - 2 * k;
    let u = vector_params(p, "u", n - 4);
    let beta = vector_params(p, "beta", m);
    let nu = vector_params(p, "nu", m);
    // Intra-block area forms of the rotation planes.
    let mut tau1_terms: Vec<(usize, usize, f64)> = Vec::new();
    for i in 1..=k {
        let t = p.take_or(&format!("tau1_{i}"), 0.0);
        if t != 0.0 {
            tau1_terms.push((2 + 2 * i, 3 + 2 * i, t));
        }
    }
    // Cross-block terms exist only between planes of equal speed.
    let mut tau1_cross: Vec<(usize, usize, f64, f64)> = Vec::new();
    for i in 1..=k {
        for j in (i + 1)..=k {
            let tc = p.take_or(&format!("tau1c_{i}{j}"), 0.0);
            let td = p.take_or(&format!("tau1d_{i}{j}"), 0.0);
            if (tc != 0.0 || td != 0.0) && (speeds[i - 1] - speeds[j - 1]).abs() > 1e-12 {
                return Err(bad_param(
                    &format!("tau1c_{i}{j}"),
                    "cross terms require equal rotation speeds",
                ));
            }
            if tc != 0.0 || td != 0.0 {
                tau1_cross.push((i, j, tc, td));
            }
        }
    }
    let mut tau2_terms: Vec<(usize, usize, f64)> = Vec::new();
    for pp in 1..=m {
        for q in (pp + 1)..=m {
            let t = p.take_or(&format!("tau2_{pp}{q}"), 0.0);
            if t != 0.0 {
                tau2_terms.push((3 + 2 * k + pp, 3 + 2 * k + q, t));
            }
        }
    }

    let one = |i: usize| KForm::basis_one_form(n, i - 1);
    let u2_index = |pp: usize| 3 + 2 * k + pp;
    let covector = |coeffs: &[f64], start: usize| -> KForm {
        let mut xi = DVector::zeros(n);
        for (pp, &c) in coeffs.iter().enumerate() {
            xi[start + pp - 1] = c;
        }
        KForm::from_covector(&xi)
    };
    let nu_form = covector(&nu, u2_index(1));
    let beta_form = covector(&beta, u2_index(1));
    let x_flat = one(n);
    let mut tau1 = KForm::zero(n, 2)?;
    for &(i, j, t) in &tau1_terms {
        tau1 = tau1.add(&one(i).wedge(&one(j))?.scale(t))?;
    }
    for &(i, j, tc, td) in &tau1_cross {
        let (xi, yi) = (2 + 2 * i, 3 + 2 * i);
        let (xj, yj) = (2 + 2 * j, 3 + 2 * j);
        let c_term = one(xi).wedge(&one(xj))?.add(&one(yi).wedge(&one(yj))?)?;
        let d_term = one(xi).wedge(&one(yj))?.add(&one(xj).wedge(&one(yi))?)?;
        tau1 = tau1.add(&c_term.scale(tc))?.add(&d_term.scale(td))?;
    }
    let mut tau2 = KForm::zero(n, 2)?;
    for &(i, j, t) in &tau2_terms {
        tau2 = tau2.add(&one(i).wedge(&one(j))?.scale(t))?;
    }

    let metric = ScalarProduct::lorentzian_neg_first(n);
    let rho = 0.5
        * (b * b
            + metric.form_inner(&beta_form, &beta_form)?
            + metric.form_inner(&nu_form, &nu_form)?
            + metric.form_inner(&tau1, &tau1)?
            + metric.form_inner(&tau2, &tau2)?);
    if rho == 0.0 {
        return Err(bad_param(
            "b",
            "the torsion vanishes; at least one of b, beta*, nu*, tau1*, tau2* must be nonzero",
        ));
    }

    // H = (e^1 + e^3) ^ ( -e^2 ^ (nu + b X^flat) + beta ^ X^flat + tau1 + tau2 ).
    let inner = one(2)
        .wedge(&nu_form.add(&x_flat.scale(b))?)?
        .scale(-1.0)
        .add(&beta_form.wedge(&x_flat)?)?
        .add(&tau1)?
        .add(&tau2)?;
    let h = one(1).add(&one(3))?.wedge(&inner)?;

    let s = 1.0 / 2f64.sqrt();
    let mut f = DMatrix::zeros(n - 1, n - 1);
    f[(0, 1)] = -s * (1.0 + rho);
    f[(1, 0)] = s * (1.0 - rho);
    f[(1, 2)] = s * (1.0 - rho);
    f[(2, 1)] = s * (1.0 + rho);
    for (q, &uq) in u.iter().enumerate() {
        f[(0, 3 + q)] = uq;
        f[(2, 3 + q)] = -uq;
        f[(3 + q, 0)] = uq;
        f[(3 + q, 2)] = uq;
    }
    embed(&mut f, 3, 3, &rotation_blocks(n - 4, &speeds));
    Ok((f, h))
}

fn build_aa_hneq0_4th(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("aa.Hneq0.4th", params);
    let (f, h) = spiral_torsion_data(&mut p)?;
    p.finish()?;
    let n = f.nrows() + 1;
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&f)?,
        ScalarProduct::lorentzian_neg_first(n),
        h,
        TOL,
    )
}

fn build_aa_4d_i(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("aa.4d.i", params);
    let a = p.take_or("a", 1.0);
    p.finish()?;
    let f = rotation_blocks(3, &[a]);
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&f)?,
        ScalarProduct::diagonal(&[1.0, 1.0, 1.0, -1.0])?,
        KForm::zero(4, 3)?,
        TOL,
    )
}

fn build_aa_4d_ii(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("aa.4d.ii", params);
    let sigma = p.take_or("sigma", 1.0);
    p.finish()?;
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&m3(sigma))?,
        ScalarProduct::lorentzian_neg_first(4),
        KForm::zero(4, 3)?,
        TOL,
    )
}

fn build_aa_4d_iii(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("aa.4d.iii", params);
    p.forbid("beta", "the rotation radius is derived from alpha and a")?;
    let alpha = p.take_or("alpha", 1.0);
    let a = p.take_or("a", 0.0);
    p.finish()?;
    if alpha == 0.0 && a == 0.0 {
        return Err(bad_param("alpha", "(alpha, a) must be nonzero"));
    }
    let beta = (alpha * alpha + a * a / 2.0).sqrt();
    let mut f = DMatrix::zeros(3, 3);
    embed(&mut f, 0, 0, &l1(alpha, beta));
    f[(2, 2)] = a;
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&f)?,
        ScalarProduct::lorentzian_neg_first(4),
        KForm::zero(4, 3)?,
        TOL,
    )
}

fn build_aa_4d_iv(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("aa.4d.iv", params);
    let eps = sign_param("eps", p.take_or("eps", 1.0))?;
    let v = p.take_or("v", 0.0);
    p.finish()?;
    let f = DMatrix::from_row_slice(
        3,
        3,
        &[
            eps / 2.0,
            eps / 2.0,
            v,
            -eps / 2.0,
            -eps / 2.0,
            -v,
            v,
            v,
            0.0,
        ],
    );
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&f)?,
        ScalarProduct::lorentzian_neg_first(4),
        KForm::zero(4, 3)?,
        TOL,
    )
}

fn build_aa_4d_v(params: &ParamMap) -> Result<GEProblem> {
    let p = Params::new("aa.4d.v", params);
    p.finish()?;
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&l3(0.0))?,
        ScalarProduct::lorentzian_neg_first(4),
        KForm::zero(4, 3)?,
        TOL,
    )
}

/// Endomorphism and three-form of the four-dimensional family with nonzero
/// torsion: `H = a (e^1 + e^3) ^ e^2 ^ X^flat`.
fn spiral_torsion_4d(a: f64) -> Result<(DMatrix<f64>, KForm)> {
    let rho = a * a / 2.0;
    let s = 1.0 / 2f64.sqrt();
    let mut f = DMatrix::zeros(3, 3);
    f[(0, 1)] = -s * (1.0 + rho);
    f[(1, 0)] = s * (1.0 - rho);
    f[(1, 2)] = s * (1.0 - rho);
    f[(2, 1)] = s * (1.0 + rho);
    let h = three_form(4, &[(1, 2, 4, a), (2, 3, 4, -a)])?;
    Ok((f, h))
}

fn build_aa_4d_vi(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("aa.4d.vi", params);
    let a = p.take_or("a", 1.0);
    if a == 0.0 {
        return Err(bad_param("a", "must be nonzero"));
    }
    p.finish()?;
    let (f, h) = spiral_torsion_4d(a)?;
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&f)?,
        ScalarProduct::lorentzian_neg_first(4),
        h,
        TOL,
    )
}

fn build_aa_4d_vii(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("aa.4d.vii", params);
    let a = p.take_or("a", 1.0);
    let b1 = p.take_or("b1", 0.0);
    let b2 = p.take_or("b2", 0.0);
    p.finish()?;
    let f = DMatrix::from_row_slice(3, 3, &[0.0, -a, 0.0, a, 0.0, 0.0, b1, b2, 0.0]);
    let metric = ScalarProduct::new(DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    ))?;
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&f)?,
        metric,
        KForm::zero(4, 3)?,
        TOL,
    )
}

fn build_aa_4d_hneq0(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("aa.4d.Hneq0", params);
    let b = p.take_or("b", 1.0);
    if b == 0.0 {
        return Err(bad_param("b", "must be nonzero"));
    }
    p.finish()?;
    let (f, h) = spiral_torsion_4d(b)?;
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&f)?,
        ScalarProduct::lorentzian_neg_first(4),
        h,
        TOL,
    )
}

fn build_aa_deg(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("aa.deg", params);
    let n = dim_param("n", p.take_or("n", 4.0))?;
    if n < 3 {
        return Err(bad_param("n", "must be at least 3"));
    }
    let speeds = p.seq("c");
    descending_positive("c", &speeds)?;
    if 2 * speeds.len() > n - 2 {
        return Err(bad_param("c1", "too many rotation blocks for the dimension"));
    }
    let alpha = vector_params(&mut p, "alpha", n - 2);
    p.finish()?;
    let mut f = DMatrix::zeros(n - 1, n - 1);
    embed(&mut f, 0, 0, &rotation_blocks(n - 2, &speeds));
    for (j, &aj) in alpha.iter().enumerate() {
        f[(n - 2, j)] = aj;
    }
    let mut metric = DMatrix::identity(n, n);
    metric[(n - 2, n - 2)] = 0.0;
    metric[(n - 1, n - 1)] = 0.0;
    metric[(n - 2, n - 1)] = 1.0;
    metric[(n - 1, n - 2)] = 1.0;
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&f)?,
        ScalarProduct::new(metric)?,
        KForm::zero(n, 3)?,
        TOL,
    )
}

fn build_red_so3(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("red.so3", params);
    let a = p.take_or("a", 1.0);
    if a == 0.0 {
        return Err(bad_param("a", "must be nonzero"));
    }
    let b = p.take_or("b", 1.0);
    let eps = sign_param("eps", p.take_or("eps", 1.0))?;
    p.finish()?;
    GEProblem::with_zero_divergence(
        LieAlgebra::new(4, &so3_r_brackets(a, b, eps))?,
        ScalarProduct::euclidean(4),
        three_form(4, &[(1, 2, 3, a)])?,
        TOL,
    )
}

fn so21_brackets(a: f64, eps: f64) -> Vec<(usize, usize, usize, f64)> {
    vec![
        (1, 2, 3, eps * a),
        (2, 3, 1, -eps * a),
        (3, 1, 2, eps * a),
    ]
}

fn build_red_so21(
    family: &'static str,
    extra: fn(f64) -> Vec<(usize, usize, usize, f64)>,
    b_required_nonzero: bool,
    has_b: bool,
    params: &ParamMap,
) -> Result<GEProblem> {
    let mut p = Params::new(family, params);
    let a = p.take_or("a", 1.0);
    if a == 0.0 {
        return Err(bad_param("a", "must be nonzero"));
    }
    let b = if has_b { p.take_or("b", 1.0) } else { 0.0 };
    if b_required_nonzero && b == 0.0 {
        return Err(bad_param("b", "must be nonzero"));
    }
    let eps = sign_param("eps", p.take_or("eps", 1.0))?;
    p.finish()?;
    let mut entries = so21_brackets(a, eps);
    entries.extend(extra(b));
    GEProblem::with_zero_divergence(
        LieAlgebra::new(4, &entries)?,
        ScalarProduct::lorentzian_neg_first(4),
        three_form(4, &[(1, 2, 3, a)])?,
        TOL,
    )
}

fn build_red_so21_alpha(params: &ParamMap) -> Result<GEProblem> {
    build_red_so21(
        "red.so21.alpha",
        |b| vec![(4, 2, 3, b), (4, 3, 2, -b)],
        false,
        true,
        params,
    )
}

fn build_red_so21_beta(params: &ParamMap) -> Result<GEProblem> {
    build_red_so21(
        "red.so21.beta",
        |b| vec![(4, 1, 2, b), (4, 2, 1, b)],
        true,
        true,
        params,
    )
}

fn build_red_so21_gamma(params: &ParamMap) -> Result<GEProblem> {
    build_red_so21(
        "red.so21.gamma",
        |_| vec![(4, 1, 2, 1.0), (4, 2, 1, 1.0), (4, 2, 3, 1.0), (4, 3, 2, -1.0)],
        false,
        false,
        params,
    )
}

fn build_heis_4d(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("heis.4d", params);
    let lambda = p.take_or("lambda", 1.0);
    if lambda == 0.0 {
        return Err(bad_param("lambda", "must be nonzero"));
    }
    let b = p.take_or("b", 0.0);
    let f = p.take_or("f", 0.0);
    let b1 = p.take_or("b1", 0.0);
    let sign = sign_param("sign", p.take_or("sign", 1.0))?;
    p.finish()?;
    let top = sign * (f * f + b1 * b1).sqrt();
    let mut entries = vec![(2, 3, 1, lambda)];
    for (i, k, c) in [(2, 1, b), (2, 3, f), (3, 1, top)] {
        if c != 0.0 {
            entries.push((4, i, k, c));
        }
    }
    let metric = ScalarProduct::new(DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 1.0, 0.0, 0.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    ))?;
    GEProblem::with_zero_divergence(
        LieAlgebra::new(4, &entries)?,
        metric,
        three_form(4, &[(2, 3, 4, b1)])?,
        TOL,
    )
}

fn build_ex_ab32(params: &ParamMap) -> Result<GEProblem> {
    let p = Params::new("ex.ab32", params);
    p.finish()?;
    GEProblem::with_zero_divergence(
        LieAlgebra::new(5, &[])?,
        ScalarProduct::diagonal(&[1.0, 1.0, 1.0, -1.0, -1.0])?,
        three_form(
            5,
            &[
                (1, 2, 3, 1.0),
                (1, 2, 4, 1.0),
                (1, 3, 5, 1.0),
                (1, 4, 5, 1.0),
            ],
        )?,
        TOL,
    )
}

fn build_ex_aa5d(params: &ParamMap) -> Result<GEProblem> {
    let p = Params::new("ex.aa5d", params);
    p.finish()?;
    let f = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, -2.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 1.0, //
            0.0, 0.0, -1.0, -1.0,
        ],
    );
    let r = 2f64.sqrt();
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&f)?,
        ScalarProduct::lorentzian_neg_first(5),
        three_form(
            5,
            &[
                (1, 3, 5, r),
                (1, 4, 5, r),
                (2, 3, 5, -r),
                (2, 4, 5, r),
            ],
        )?,
        TOL,
    )
}

fn build_sig_n22(params: &ParamMap) -> Result<GEProblem> {
    let mut p = Params::new("sig.n22", params);
    let case = p.require("case")?;
    if case.fract() != 0.0 || !(1.0..=7.0).contains(&case) {
        return Err(bad_param("case", "must be an integer between 1 and 7"));
    }
    let case = case as usize;
    let eps = sign_param("eps", p.take_or("eps", 1.0))?;
    let (f, h) = if case == 7 {
        let b = p.take_or("b", 1.0);
        if b == 0.0 {
            return Err(bad_param("b", "must be nonzero"));
        }
        spiral_torsion_4d(b)?
    } else {
        let f = lorentzian_case_f(case, &mut p, "eps_f")?;
        let n = f.nrows() + 1;
        (f, KForm::zero(n, 3)?)
    };
    p.finish()?;
    let n = f.nrows() + 1;
    if eps < 0.0 && n != 4 {
        return Err(bad_param(
            "eps",
            "the overall sign flip only preserves the signature in dimension four",
        ));
    }
    let mut diag = vec![eps; n];
    diag[0] = -eps;
    diag[n - 1] = -eps;
    GEProblem::with_zero_divergence(
        almost_abelian_algebra(&f)?,
        ScalarProduct::diagonal(&diag)?,
        h,
        TOL,
    )
}

/// A parametrised builder producing generalised Einstein problems.
#[derive(Clone)]
pub struct FamilySpec {
    pub family_id: &'static str,
    pub description: &'static str,
    /// Scalar parameter names; a trailing `*` marks an indexed sequence
    /// (`c*` stands for `c1, c2, ...`).
    pub param_names: &'static [&'static str],
    pub param_domain: &'static str,
    pub builder: fn(&ParamMap) -> Result<GEProblem>,
}

const FAMILIES: &[FamilySpec] = &[
    FamilySpec {
        family_id: "riem.4d.i",
        description: "flat Abelian algebra, Riemannian, arbitrary divergence",
        param_names: &["dv1", "dv2", "dv3", "dv4", "dc1", "dc2", "dc3", "dc4"],
        param_domain: "all real",
        builder: build_riem_4d_i,
    },
    FamilySpec {
        family_id: "riem.4d.ii",
        description: "e(2)+R, Riemannian, divergence supported on the flat directions",
        param_names: &["a", "dv3", "dv4", "dc3", "dc4"],
        param_domain: "a > 0",
        builder: build_riem_4d_ii,
    },
    FamilySpec {
        family_id: "riem.4d.iii",
        description: "so(3)+R with torsion a e123, Riemannian",
        param_names: &["a", "b", "eps", "dc1", "dc2", "dc3", "dv4", "dc4"],
        param_domain: "a != 0; eps in {-1,1}; dc2 = dc3 = 0 unless b = 0",
        builder: build_riem_4d_iii,
    },
    FamilySpec {
        family_id: "aa.H0.riem",
        description: "almost Abelian, positive definite ideal, torsion-free rotations",
        param_names: &["n", "a*"],
        param_domain: "a1 >= ... >= ak > 0, 2k <= n-1",
        builder: build_aa_h0_riem,
    },
    FamilySpec {
        family_id: "aa.H0.lor.i",
        description: "three-dimensional symmetric shear on a Lorentzian ideal",
        param_names: &["rho"],
        param_domain: "rho real",
        builder: build_aa_h0_lor_i,
    },
    FamilySpec {
        family_id: "aa.H0.lor.ii",
        description: "even-dimensional Lorentzian ideal, null block plus rotations",
        param_names: &["n", "sigma", "a*"],
        param_domain: "n even >= 4; a1 >= ... >= ak > 0, 2k <= n-4",
        builder: build_aa_h0_lor_ii,
    },
    FamilySpec {
        family_id: "aa.H0.lor.iii",
        description: "odd-dimensional Lorentzian ideal, null block plus rotations",
        param_names: &["n", "sigma", "tau", "a*"],
        param_domain: "n odd >= 5; tau >= 0; a1 >= ... >= ak > 0, 2k <= n-5",
        builder: build_aa_h0_lor_iii,
    },
    FamilySpec {
        family_id: "aa.H0.lor.iv",
        description: "boosted rotation of derived radius plus spirals and stretches",
        param_names: &["alpha", "a*", "b*", "c*"],
        param_domain: "b1 >= ... >= bk > 0; c1 >= ... >= cs; not all of alpha, a*, c* zero",
        builder: build_aa_h0_lor_iv,
    },
    FamilySpec {
        family_id: "aa.H0.lor.v",
        description: "two-dimensional null shear coupled to rotations",
        param_names: &["eps", "n", "v*", "a*"],
        param_domain: "eps in {-1,1}; n >= 4; 2k <= n-3",
        builder: build_aa_h0_lor_v,
    },
    FamilySpec {
        family_id: "aa.H0.lor.vi",
        description: "three-dimensional null rotation coupled to rotations",
        param_names: &["n", "v*", "a*"],
        param_domain: "n >= 4; 2k <= n-4",
        builder: build_aa_h0_lor_vi,
    },
    FamilySpec {
        family_id: "aa.Hneq0.4th",
        description: "almost Abelian with nonzero torsion through a null rotation",
        param_names: &[
            "n", "b", "c*", "u*", "beta*", "nu*", "tau1_*", "tau1c_*", "tau1d_*", "tau2_*",
        ],
        param_domain: "n >= 4; c1 >= ... >= ck > 0, 2k <= n-4; at least one torsion component nonzero",
        builder: build_aa_hneq0_4th,
    },
    FamilySpec {
        family_id: "aa.4d.i",
        description: "four-dimensional, positive definite ideal, single rotation",
        param_names: &["a"],
        param_domain: "a real",
        builder: build_aa_4d_i,
    },
    FamilySpec {
        family_id: "aa.4d.ii",
        description: "four-dimensional Lorentzian ideal, null block",
        param_names: &["sigma"],
        param_domain: "sigma real",
        builder: build_aa_4d_ii,
    },
    FamilySpec {
        family_id: "aa.4d.iii",
        description: "four-dimensional Lorentzian ideal, boosted rotation plus stretch",
        param_names: &["alpha", "a"],
        param_domain: "(alpha, a) != (0, 0)",
        builder: build_aa_4d_iii,
    },
    FamilySpec {
        family_id: "aa.4d.iv",
        description: "four-dimensional Lorentzian ideal, null shear",
        param_names: &["eps", "v"],
        param_domain: "eps in {-1,1}; v real",
        builder: build_aa_4d_iv,
    },
    FamilySpec {
        family_id: "aa.4d.v",
        description: "four-dimensional Lorentzian ideal, null rotation",
        param_names: &[],
        param_domain: "no parameters",
        builder: build_aa_4d_v,
    },
    FamilySpec {
        family_id: "aa.4d.vi",
        description: "four-dimensional Lorentzian ideal with nonzero torsion",
        param_names: &["a"],
        param_domain: "a != 0",
        builder: build_aa_4d_vi,
    },
    FamilySpec {
        family_id: "aa.4d.vii",
        description: "four-dimensional degenerate ideal in a Witt frame",
        param_names: &["a", "b1", "b2"],
        param_domain: "all real",
        builder: build_aa_4d_vii,
    },
    FamilySpec {
        family_id: "aa.4d.Hneq0",
        description: "four-dimensional nonzero-torsion family in its own frame",
        param_names: &["b"],
        param_domain: "b != 0",
        builder: build_aa_4d_hneq0,
    },
    FamilySpec {
        family_id: "aa.deg",
        description: "degenerate ideal in a Witt frame, rotations plus a null row",
        param_names: &["n", "c*", "alpha*"],
        param_domain: "n >= 3; c1 >= ... >= ck > 0, 2k <= n-2",
        builder: build_aa_deg,
    },
    FamilySpec {
        family_id: "red.so3",
        description: "so(3)+R with torsion a e123, Riemannian, zero divergence",
        param_names: &["a", "b", "eps"],
        param_domain: "a != 0; eps in {-1,1}",
        builder: build_red_so3,
    },
    FamilySpec {
        family_id: "red.so21.alpha",
        description: "so(2,1)+R, rotation coupling on the second factor",
        param_names: &["a", "b", "eps"],
        param_domain: "a != 0; eps in {-1,1}",
        builder: build_red_so21_alpha,
    },
    FamilySpec {
        family_id: "red.so21.beta",
        description: "so(2,1)+R, boost coupling on the second factor",
        param_names: &["a", "b", "eps"],
        param_domain: "a != 0; b != 0; eps in {-1,1}",
        builder: build_red_so21_beta,
    },
    FamilySpec {
        family_id: "red.so21.gamma",
        description: "so(2,1)+R, null coupling on the second factor",
        param_names: &["a", "eps"],
        param_domain: "a != 0; eps in {-1,1}",
        builder: build_red_so21_gamma,
    },
    FamilySpec {
        family_id: "heis.4d",
        description: "Heisenberg ideal in a Witt frame with torsion b1 e234",
        param_names: &["lambda", "b", "f", "b1", "sign"],
        param_domain: "lambda != 0; sign in {-1,1}",
        builder: build_heis_4d,
    },
    FamilySpec {
        family_id: "ex.ab32",
        description: "Abelian algebra of signature (3,2) with nonzero torsion",
        param_names: &[],
        param_domain: "no parameters",
        builder: build_ex_ab32,
    },
    FamilySpec {
        family_id: "ex.aa5d",
        description: "five-dimensional almost Abelian example with nonzero torsion",
        param_names: &[],
        param_domain: "no parameters",
        builder: build_ex_aa5d,
    },
    FamilySpec {
        family_id: "sig.n22",
        description: "signature (n-2,2) almost Abelian families, by case number",
        param_names: &["case", "eps", "rho", "n", "sigma", "tau", "alpha", "a*", "b*", "c*", "v*", "eps_f", "b"],
        param_domain: "case in 1..=7; eps in {-1,1} (dimension four only)",
        builder: build_sig_n22,
    },
];

/// All builder families.
pub fn families() -> &'static [FamilySpec] {
    FAMILIES
}

/// Canonicalises a family id: trims, lowercases and spells out Greek letters.
fn normalize_family_id(id: &str) -> String {
    let mut out = String::new();
    for c in id.trim().chars() {
        match c {
            'α' => out.push_str("alpha"),
            'β' => out.push_str("beta"),
            'γ' => out.push_str("gamma"),
            'ν' => out.push_str("nu"),
            _ => out.extend(c.to_lowercase()),
        }
    }
    // The torsion marker is spelled with a capital H in the canonical ids.
    out.replace("h0", "H0").replace("hneq0", "Hneq0")
}

/// Looks a family up by id; Greek spellings like `"red.so21.γ"` are accepted.
pub fn family(id: &str) -> Result<&'static FamilySpec> {
    let wanted = normalize_family_id(id);
    FAMILIES
        .iter()
        .find(|f| f.family_id == wanted)
        .ok_or_else(|| Error::UnknownFamily { id: id.to_string() })
}

/// Builds the generalised Einstein problem of the family at the given
/// parameters. Parameter maps are validated strictly; see [`FamilySpec`].
pub fn instantiate_family(id: &str, params: &ParamMap) -> Result<GEProblem> {
    let spec = family(id)?;
    (spec.builder)(params)
}

fn fmt_trimmed(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Isomorphism class of the underlying Lie algebra at the given parameters,
/// named by catalog entry. Only families whose classification records the
/// class carry labels; all other ids return [`Error::NoIsomorphismLabel`].
pub fn isomorphism_label(id: &str, params: &ParamMap) -> Result<String> {
    let spec = family(id)?;
    let get = |name: &str, default: f64| params.get(name).copied().unwrap_or(default);
    let no_label = || Error::NoIsomorphismLabel {
        id: spec.family_id.to_string(),
    };
    // The boosted-rotation member A4,6^{x,y} with x^2 + 2 y^2 = 2, found by
    // rescaling diag(L1(alpha, beta), a) to unit rotation speed.
    let spiral_label = |alpha: f64, a: f64| -> String {
        let beta = (alpha * alpha + a * a / 2.0).sqrt();
        format!(
            "A4,6^{{{},{}}}",
            fmt_trimmed(a / beta),
            fmt_trimmed(alpha / beta)
        )
    };
    let torsion_label = |b: f64| -> String {
        if (b * b - 2.0).abs() < 1e-12 {
            "h3+R".to_string()
        } else {
            "A4,1".to_string()
        }
    };
    let null_block_label = |sigma: f64| -> String {
        if sigma > 0.0 {
            "e(2)+R".to_string()
        } else if sigma == 0.0 {
            "A4,1".to_string()
        } else {
            "e(1,1)+R".to_string()
        }
    };
    Ok(match spec.family_id {
        "riem.4d.i" => "R^4".to_string(),
        "riem.4d.ii" => "e(2)+R".to_string(),
        "riem.4d.iii" | "red.so3" => "so(3)+R".to_string(),
        "red.so21.alpha" | "red.so21.beta" | "red.so21.gamma" => "so(2,1)+R".to_string(),
        "ex.ab32" => "R^5".to_string(),
        "aa.4d.i" => {
            if get("a", 1.0) != 0.0 {
                "e(2)+R".to_string()
            } else {
                "R^4".to_string()
            }
        }
        "aa.4d.ii" => null_block_label(get("sigma", 1.0)),
        "aa.4d.iii" => {
            let alpha = get("alpha", 1.0);
            let a = get("a", 0.0);
            if a != 0.0 {
                spiral_label(alpha, a)
            } else {
                "r'3,1+R".to_string()
            }
        }
        "aa.4d.iv" => {
            if get("v", 0.0) != 0.0 {
                "A4,1".to_string()
            } else {
                "h3+R".to_string()
            }
        }
        "aa.4d.v" => "A4,1".to_string(),
        "aa.4d.vi" => torsion_label(get("a", 1.0)),
        "aa.4d.Hneq0" => torsion_label(get("b", 1.0)),
        "aa.4d.vii" => {
            let a = get("a", 1.0);
            let b1 = get("b1", 0.0);
            let b2 = get("b2", 0.0);
            if a != 0.0 {
                "e(2)+R".to_string()
            } else if (b1, b2) != (0.0, 0.0) {
                "h3+R".to_string()
            } else {
                "R^4".to_string()
            }
        }
        "heis.4d" => {
            if get("f", 0.0) != 0.0 {
                "A4,1".to_string()
            } else {
                "h3+R".to_string()
            }
        }
        "aa.deg" => {
            if get("n", 4.0) != 4.0 {
                return Err(no_label());
            }
            let has_rotation = get("c1", 0.0) != 0.0;
            let alpha_nonzero = get("alpha1", 0.0) != 0.0 || get("alpha2", 0.0) != 0.0;
            if has_rotation {
                "e(2)+R".to_string()
            } else if alpha_nonzero {
                "h3+R".to_string()
            } else {
                "R^4".to_string()
            }
        }
        "aa.Hneq0.4th" => {
            if get("n", 5.0) != 4.0 {
                return Err(no_label());
            }
            torsion_label(get("b", 1.0))
        }
        "sig.n22" => {
            let case = get("case", 0.0);
            match case as usize {
                2 if get("n", 4.0) == 4.0 => null_block_label(get("sigma", 1.0)),
                4 if params.get("a1").is_none()
                    && params.get("c2").is_none()
                    && params.get("c1").is_some() =>
                {
                    let c1 = get("c1", 0.0);
                    let alpha = get("alpha", 1.0);
                    if c1 != 0.0 {
                        spiral_label(alpha, c1)
                    } else {
                        "r'3,1+R".to_string()
                    }
                }
                5 if get("n", 4.0) == 4.0 => {
                    if get("v1", 0.0) != 0.0 {
                        "A4,1".to_string()
                    } else {
                        "h3+R".to_string()
                    }
                }
                6 if get("n", 4.0) == 4.0 => "A4,1".to_string(),
                7 => torsion_label(get("b", 1.0)),
                _ => return Err(no_label()),
            }
        }
        _ => return Err(no_label()),
    })
}

fn pm(pairs: &[(&str, f64)]) -> ParamMap {
    pairs
        .iter()
        .map(|&(name, value)| (name.to_string(), value))
        .collect()
}

/// The default parameter grid of a family: at least five values per scalar
/// parameter at the family's reference dimension, plus combined points and
/// higher-dimensional rows where the family supports them.
pub fn default_grid(id: &str) -> Result<Vec<ParamMap>> {
    let spec = family(id)?;
    let mut rows: Vec<ParamMap> = Vec::new();
    match spec.family_id {
        "riem.4d.i" => {
            rows.push(pm(&[]));
            for &t in &[-2.0, -1.0, 0.5, 1.5, 3.0] {
                let mut m = ParamMap::new();
                for i in 1..=4usize {
                    m.insert(format!("dv{i}"), t * 0.1 * i as f64);
                    m.insert(format!("dc{i}"), t * (0.05 * i as f64 + 0.02));
                }
                rows.push(m);
            }
        }
        "riem.4d.ii" => {
            rows.push(pm(&[]));
            let a_vals = [0.25, 0.5, 1.0, 2.0, 4.0];
            let t_vals = [0.0, 1.0, -1.0, 2.0, -0.5];
            for (&a, &t) in a_vals.iter().zip(&t_vals) {
                rows.push(pm(&[
                    ("a", a),
                    ("dv3", 0.3 * t),
                    ("dv4", -0.7 * t),
                    ("dc3", 0.2 * t),
                    ("dc4", 0.9 * t),
                ]));
            }
        }
        "riem.4d.iii" => {
            rows.push(pm(&[]));
            let a_vals = [-2.0, -1.0, 0.5, 1.0, 3.0];
            let b_vals = [-1.0, 0.5, 1.0, 2.0, -2.0];
            let eps_vals = [1.0, -1.0, 1.0, -1.0, 1.0];
            let c1_vals = [0.0, 0.4, -0.6, 1.0, -1.2];
            let v4_vals = [0.3, 0.0, -0.5, 0.8, -1.0];
            let c4_vals = [-0.2, 0.5, 0.0, -0.8, 1.0];
            for i in 0..5 {
                rows.push(pm(&[
                    ("a", a_vals[i]),
                    ("b", b_vals[i]),
                    ("eps", eps_vals[i]),
                    ("dc1", c1_vals[i]),
                    ("dv4", v4_vals[i]),
                    ("dc4", c4_vals[i]),
                ]));
            }
            // b = 0 frees the remaining covector components.
            let a0 = [0.7, -0.9, 1.4, 2.2, -1.8];
            let c1 = [0.5, -0.5, 0.9, 0.0, 1.3];
            let c2 = [0.3, -0.2, 0.6, -0.7, 0.1];
            let c3 = [-0.4, 0.3, 0.0, 0.8, -0.6];
            for i in 0..5 {
                rows.push(pm(&[
                    ("a", a0[i]),
                    ("b", 0.0),
                    ("eps", if i % 2 == 0 { -1.0 } else { 1.0 }),
                    ("dc1", c1[i]),
                    ("dc2", c2[i]),
                    ("dc3", c3[i]),
                ]));
            }
        }
        "aa.H0.riem" => {
            rows.push(pm(&[]));
            for &a in &[0.5, 1.0, 2.0, 3.5, 5.0] {
                rows.push(pm(&[("a1", a)]));
            }
            let pairs = [(2.0, 1.0), (3.0, 0.5), (5.0, 2.5), (1.5, 1.5), (4.0, 0.8)];
            for &(a1, a2) in &pairs {
                rows.push(pm(&[("n", 6.0), ("a1", a1), ("a2", a2)]));
            }
            rows.push(pm(&[("n", 5.0), ("a1", 2.0), ("a2", 1.0)]));
        }
        "aa.H0.lor.i" => {
            for &rho in &[-2.0, -1.0, 0.0, 0.5, 1.0, 3.0] {
                rows.push(pm(&[("rho", rho)]));
            }
        }
        "aa.H0.lor.ii" => {
            rows.push(pm(&[]));
            for &sigma in &[-2.0, -1.0, 0.0, 1.0, 2.0] {
                rows.push(pm(&[("sigma", sigma)]));
            }
            let six = [(1.0, 0.5), (0.5, 1.0), (-1.0, 2.0), (2.0, 1.5), (-0.5, 3.0)];
            for &(sigma, a1) in &six {
                rows.push(pm(&[("n", 6.0), ("sigma", sigma), ("a1", a1)]));
            }
            let eight = [
                (1.2, 3.0, 1.0),
                (-1.5, 2.5, 0.5),
                (0.4, 4.0, 2.0),
                (2.2, 2.0, 1.2),
                (-0.8, 1.4, 0.3),
            ];
            for &(sigma, a1, a2) in &eight {
                rows.push(pm(&[("n", 8.0), ("sigma", sigma), ("a1", a1), ("a2", a2)]));
            }
        }
        "aa.H0.lor.iii" => {
            rows.push(pm(&[]));
            let base = [(-2.0, 0.0), (-1.0, 0.5), (0.0, 1.0), (1.0, 2.0), (2.0, 3.0)];
            for &(sigma, tau) in &base {
                rows.push(pm(&[("sigma", sigma), ("tau", tau)]));
            }
            for &a1 in &[0.5, 1.0, 2.0, 3.0, 1.5] {
                rows.push(pm(&[("n", 7.0), ("sigma", 1.0), ("tau", 1.0), ("a1", a1)]));
            }
        }
        "aa.H0.lor.iv" => {
            rows.push(pm(&[]));
            // Dimension four: one stretch.
            let alpha4 = [0.0, 1.0, -1.0, 2.0, 0.5];
            let c4 = [1.0, 0.5, 2.0, -1.0, 3.0];
            for i in 0..5 {
                rows.push(pm(&[("alpha", alpha4[i]), ("c1", c4[i])]));
            }
            // Dimension five: one spiral pair.
            let alpha5 = [0.3, -0.7, 1.2, 0.0, -1.5];
            let a5 = [-1.0, 0.0, 1.0, 2.0, 0.5];
            let b5 = [2.0, 1.0, 3.0, 0.5, 1.5];
            for i in 0..5 {
                rows.push(pm(&[("alpha", alpha5[i]), ("a1", a5[i]), ("b1", b5[i])]));
            }
            // Dimension five: two stretches.
            let alpha52 = [0.6, -0.4, 1.1, 0.0, -2.0];
            let c51 = [2.0, 1.0, 3.0, 1.5, 0.0];
            let c52 = [1.0, -1.0, 0.5, 1.5, -2.0];
            for i in 0..5 {
                rows.push(pm(&[
                    ("alpha", alpha52[i]),
                    ("c1", c51[i]),
                    ("c2", c52[i]),
                ]));
            }
            rows.push(pm(&[("alpha", 0.5), ("a1", 1.0), ("b1", 2.0), ("c1", 1.0)]));
        }
        "aa.H0.lor.v" => {
            rows.push(pm(&[]));
            let v4 = [-2.0, -1.0, 0.0, 1.0, 2.0];
            for (i, &v) in v4.iter().enumerate() {
                rows.push(pm(&[("eps", if i % 2 == 0 { 1.0 } else { -1.0 }), ("v1", v)]));
            }
            let v51 = [0.5, -0.5, 1.5, 0.0, -1.2];
            let v52 = [1.0, -1.0, 0.4, 2.0, -0.6];
            let a5 = [0.5, 1.0, 2.0, 3.0, 1.5];
            for i in 0..5 {
                rows.push(pm(&[
                    ("n", 5.0),
                    ("eps", if i % 2 == 0 { -1.0 } else { 1.0 }),
                    ("v1", v51[i]),
                    ("v2", v52[i]),
                    ("a1", a5[i]),
                ]));
            }
        }
        "aa.H0.lor.vi" => {
            rows.push(pm(&[]));
            for &v in &[-2.0, -1.0, 0.5, 1.0, 2.0] {
                rows.push(pm(&[("n", 5.0), ("v1", v)]));
            }
            let v61 = [0.3, -0.8, 1.1, 0.0, -1.4];
            let v62 = [1.0, -1.0, 0.5, 2.0, -0.3];
            let a6 = [0.5, 1.0, 2.0, 1.5, 3.0];
            for i in 0..5 {
                rows.push(pm(&[
                    ("n", 6.0),
                    ("v1", v61[i]),
                    ("v2", v62[i]),
                    ("a1", a6[i]),
                ]));
            }
        }
        "aa.Hneq0.4th" => {
            rows.push(pm(&[]));
            for &b in &[0.5, -1.0, 1.5, 2.0, -2.5] {
                rows.push(pm(&[("n", 4.0), ("b", b)]));
            }
            let b5 = [1.0, 0.0, 2.0, -1.0, 0.5];
            let beta5 = [0.0, 1.0, -0.5, 2.0, 1.5];
            let nu5 = [0.5, -1.0, 0.0, 1.2, 2.0];
            let u5 = [0.0, 0.4, -0.8, 1.0, -1.5];
            for i in 0..5 {
                rows.push(pm(&[
                    ("b", b5[i]),
                    ("beta1", beta5[i]),
                    ("nu1", nu5[i]),
                    ("u1", u5[i]),
                ]));
            }
            let b6 = [0.0, 0.7, -1.0, 1.2, 0.4];
            let c6 = [1.0, 0.5, 2.0, 1.5, 3.0];
            let t6 = [1.0, -1.0, 0.5, 2.0, -1.5];
            let u61 = [0.2, -0.5, 1.0, 0.0, 0.8];
            let u62 = [-0.3, 0.6, 0.0, 1.1, -0.9];
            for i in 0..5 {
                rows.push(pm(&[
                    ("n", 6.0),
                    ("b", b6[i]),
                    ("c1", c6[i]),
                    ("tau1_1", t6[i]),
                    ("u1", u61[i]),
                    ("u2", u62[i]),
                ]));
            }
            let b62 = [0.3, 0.0, -0.6, 1.0, -1.3];
            let beta62 = [1.0, -0.5, 0.0, 0.8, 1.4];
            let nu62 = [0.0, 1.0, -1.0, 0.5, -0.4];
            let tau62 = [0.5, 1.0, -1.0, 0.0, 2.0];
            for i in 0..5 {
                rows.push(pm(&[
                    ("n", 6.0),
                    ("b", b62[i]),
                    ("beta2", beta62[i]),
                    ("nu2", nu62[i]),
                    ("tau2_12", tau62[i]),
                    ("beta1", 0.3),
                ]));
            }
            // Equal rotation speeds admit cross terms.
            let c8 = [1.0, 1.5, 2.0, 0.8, 1.2];
            let tc8 = [0.8, -1.0, 0.5, 1.2, -0.6];
            let td8 = [-0.5, 0.7, 1.0, -1.2, 0.4];
            let b8 = [0.3, 0.0, 1.0, -0.7, 0.5];
            for i in 0..5 {
                rows.push(pm(&[
                    ("n", 8.0),
                    ("c1", c8[i]),
                    ("c2", c8[i]),
                    ("tau1c_12", tc8[i]),
                    ("tau1d_12", td8[i]),
                    ("b", b8[i]),
                ]));
            }
        }
        "aa.4d.i" => {
            rows.push(pm(&[]));
            for &a in &[-2.0, -1.0, 0.0, 1.0, 3.0] {
                rows.push(pm(&[("a", a)]));
            }
        }
        "aa.4d.ii" => {
            rows.push(pm(&[]));
            for &sigma in &[-2.0, -1.0, 0.0, 1.0, 2.0] {
                rows.push(pm(&[("sigma", sigma)]));
            }
        }
        "aa.4d.iii" => {
            rows.push(pm(&[]));
            let pairs = [
                (0.0, 1.0),
                (1.0, 0.0),
                (-1.0, 2.0),
                (2.0, -1.0),
                (0.5, 3.0),
                (1.5, 1.0),
            ];
            for &(alpha, a) in &pairs {
                rows.push(pm(&[("alpha", alpha), ("a", a)]));
            }
        }
        "aa.4d.iv" => {
            rows.push(pm(&[]));
            let v = [-2.0, -1.0, 0.0, 1.0, 2.0, 0.7];
            for (i, &vi) in v.iter().enumerate() {
                rows.push(pm(&[
                    ("eps", if i % 2 == 0 { 1.0 } else { -1.0 }),
                    ("v", vi),
                ]));
            }
        }
        "aa.4d.v" | "ex.ab32" | "ex.aa5d" => rows.push(pm(&[])),
        "aa.4d.vi" => {
            rows.push(pm(&[]));
            for &a in &[0.5, 2f64.sqrt(), 2.0, 3.0, -1.0] {
                rows.push(pm(&[("a", a)]));
            }
        }
        "aa.4d.vii" => {
            rows.push(pm(&[]));
            let a = [0.0, 1.0, -1.0, 2.0, 0.5, 0.0];
            let b1 = [1.0, 0.0, 2.0, -1.0, 0.5, 0.0];
            let b2 = [0.0, 1.0, -2.0, 0.5, 1.0, 0.0];
            for i in 0..6 {
                rows.push(pm(&[("a", a[i]), ("b1", b1[i]), ("b2", b2[i])]));
            }
        }
        "aa.4d.Hneq0" => {
            rows.push(pm(&[]));
            for &b in &[0.5, 2f64.sqrt(), 2.0, -1.0, 3.0] {
                rows.push(pm(&[("b", b)]));
            }
        }
        "aa.deg" => {
            rows.push(pm(&[]));
            let c4 = [0.5, 1.0, 2.0, 1.5, 3.0];
            let a41 = [0.0, 1.0, -1.0, 0.5, 2.0];
            let a42 = [1.0, 0.0, 0.4, -0.8, 1.2];
            for i in 0..5 {
                rows.push(pm(&[
                    ("c1", c4[i]),
                    ("alpha1", a41[i]),
                    ("alpha2", a42[i]),
                ]));
            }
            let a51 = [0.5, -1.0, 0.0, 1.5, 2.0];
            let a52 = [1.0, 0.5, -0.5, 0.0, -1.0];
            let a53 = [0.0, 1.0, 2.0, -1.5, 0.5];
            let c5 = [1.0, 2.0, 0.5, 1.5, 3.0];
            for i in 0..5 {
                rows.push(pm(&[
                    ("n", 5.0),
                    ("c1", c5[i]),
                    ("alpha1", a51[i]),
                    ("alpha2", a52[i]),
                    ("alpha3", a53[i]),
                ]));
            }
            let c61 = [2.0, 3.0, 1.5, 4.0, 2.5];
            let c62 = [1.0, 0.5, 1.5, 2.0, 0.3];
            for i in 0..5 {
                rows.push(pm(&[
                    ("n", 6.0),
                    ("c1", c61[i]),
                    ("c2", c62[i]),
                    ("alpha1", 0.4 * i as f64 - 0.8),
                    ("alpha4", 1.0 - 0.3 * i as f64),
                ]));
            }
        }
        "red.so3" | "red.so21.alpha" => {
            rows.push(pm(&[]));
            let a = [0.5, 1.0, -1.0, 2.0, 3.0];
            let b = [0.0, 1.0, -1.0, 0.5, 2.0];
            for i in 0..5 {
                rows.push(pm(&[
                    ("a", a[i]),
                    ("b", b[i]),
                    ("eps", if i % 2 == 0 { 1.0 } else { -1.0 }),
                ]));
            }
        }
        "red.so21.beta" => {
            rows.push(pm(&[]));
            let a = [0.5, 1.0, -1.0, 2.0, 3.0];
            let b = [1.0, -1.0, 0.5, 2.0, 3.0];
            for i in 0..5 {
                rows.push(pm(&[
                    ("a", a[i]),
                    ("b", b[i]),
                    ("eps", if i % 2 == 0 { 1.0 } else { -1.0 }),
                ]));
            }
        }
        "red.so21.gamma" => {
            rows.push(pm(&[]));
            let a = [0.5, 1.0, -1.0, 2.0, 3.0];
            for i in 0..5 {
                rows.push(pm(&[
                    ("a", a[i]),
                    ("eps", if i % 2 == 0 { 1.0 } else { -1.0 }),
                ]));
            }
        }
        "heis.4d" => {
            rows.push(pm(&[]));
            let lambda = [1.0, -1.0, 0.5, 2.0, 3.0];
            let b = [0.0, 1.0, -1.0, 2.0, 0.5];
            let f = [0.0, 1.0, 2.0, -1.0, 0.5];
            let b1 = [1.0, 0.0, 2.0, 1.5, -1.0];
            for i in 0..5 {
                rows.push(pm(&[
                    ("lambda", lambda[i]),
                    ("b", b[i]),
                    ("f", f[i]),
                    ("b1", b1[i]),
                    ("sign", if i % 2 == 0 { 1.0 } else { -1.0 }),
                ]));
            }
        }
        "sig.n22" => {
            for &rho in &[-1.0, 0.0, 0.5, 1.0, 2.0] {
                rows.push(pm(&[("case", 1.0), ("rho", rho)]));
            }
            for &sigma in &[-2.0, -1.0, 0.0, 1.0, 2.0] {
                rows.push(pm(&[("case", 2.0), ("sigma", sigma)]));
            }
            rows.push(pm(&[("case", 2.0), ("sigma", 1.0), ("eps", -1.0)]));
            let s3 = [-1.0, 0.0, 1.0, 2.0, 0.5];
            let t3 = [0.0, 1.0, 0.5, 2.0, 1.5];
            for i in 0..5 {
                rows.push(pm(&[("case", 3.0), ("sigma", s3[i]), ("tau", t3[i])]));
            }
            let alpha4 = [0.0, 1.0, -1.0, 2.0, 0.5];
            let c4 = [1.0, 0.5, 2.0, -1.0, 3.0];
            for i in 0..5 {
                rows.push(pm(&[("case", 4.0), ("alpha", alpha4[i]), ("c1", c4[i])]));
            }
            rows.push(pm(&[("case", 4.0), ("alpha", 1.0), ("c1", 1.0), ("eps", -1.0)]));
            let v5 = [-2.0, -1.0, 0.0, 1.0, 2.0];
            for (i, &v) in v5.iter().enumerate() {
                rows.push(pm(&[
                    ("case", 5.0),
                    ("eps_f", if i % 2 == 0 { 1.0 } else { -1.0 }),
                    ("v1", v),
                ]));
            }
            rows.push(pm(&[("case", 5.0), ("v1", 1.0), ("eps", -1.0)]));
            rows.push(pm(&[("case", 6.0)]));
            for &v in &[-1.0, 0.5, 1.0, 2.0, -2.0] {
                rows.push(pm(&[("case", 6.0), ("n", 5.0), ("v1", v)]));
            }
            for &b in &[0.5, 1.0, 2f64.sqrt(), 2.0, -1.0] {
                rows.push(pm(&[("case", 7.0), ("b", b)]));
            }
            rows.push(pm(&[("case", 7.0), ("b", 1.0), ("eps", -1.0)]));
        }
        _ => rows.push(pm(&[])),
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::einstein::einstein_residuals;
    use crate::lie::isomorphism_class;

    #[test]
    fn differentials_round_trip() {
        for entry in table_entries() {
            let lie = entry.algebra();
            // Recover the differentials of the dual basis from the bracket and
            // rebuild; both algebras must agree structure constant by
            // structure constant.
            let mut terms = Vec::new();
            for k in 0..4 {
                let de_k = KForm::basis_one_form(4, k)
                    .ce_differential(&lie)
                    .unwrap();
                for (indices, value) in de_k.canonical_terms() {
                    terms.push((k + 1, indices[0] + 1, indices[1] + 1, value));
                }
            }
            let rebuilt = algebra_from_differentials(4, &terms).unwrap();
            for i in 0..4 {
                let diff = (lie.ad_basis(i) - rebuilt.ad_basis(i)).amax();
                assert!(diff < 1e-14, "{}: ad_{} differs by {diff}", entry.name, i);
            }
        }
    }

    #[test]
    fn table_metadata_matches_structure() {
        for entry in table_entries() {
            let lie = entry.algebra();
            assert!(
                lie.jacobi_residual() < 1e-12,
                "{}: jacobi residual",
                entry.name
            );
            let analysis = lie.structure_analysis(1e-9);
            assert_eq!(
                analysis.unimodular, entry.unimodular,
                "{}: unimodularity",
                entry.name
            );
            let commutator = lie.commutator_ideal();
            let restricted = lie.restrict(&commutator, 1e-9).unwrap();
            let label = isomorphism_class(&restricted, 1e-9).unwrap();
            assert_eq!(
                label,
                entry.commutator_label_at(&entry.default_params()),
                "{}: commutator class",
                entry.name
            );
        }
    }

    #[test]
    fn trace_degenerate_member_changes_commutator() {
        let (entry, params) = lookup_algebra("A4,9^0").unwrap();
        assert_eq!(entry.name, "A4,9^a");
        assert_eq!(entry.commutator_label_at(&params), "R^2");
        let lie = entry.algebra_at(&params).unwrap();
        assert_eq!(lie.commutator_ideal().dim(), 2);
        // The generic member has a three-dimensional nilradical class.
        let generic = entry.algebra();
        assert_eq!(generic.commutator_ideal().dim(), 3);
    }

    #[test]
    fn ideal_witnesses_realise_recorded_classes() {
        for entry in table_entries() {
            let lie = entry.algebra();
            let witnesses = entry.ideal_witnesses();
            assert_eq!(
                witnesses.len(),
                entry.codim1_ideals.len(),
                "{}: one witness per recorded class",
                entry.name
            );
            for ((label, sub), &recorded) in witnesses.iter().zip(entry.codim1_ideals) {
                assert_eq!(*label, recorded, "{}: witness order", entry.name);
                assert_eq!(sub.dim(), 3, "{}: codimension one", entry.name);
                // Ideal: brackets with the whole algebra stay inside.
                for i in 0..4 {
                    for j in 0..3 {
                        let image = lie.bracket(&basis_vector(4, i), &sub.basis_vector(j));
                        assert!(
                            sub.contains(&image, 1e-9),
                            "{}: not an ideal ({label})",
                            entry.name
                        );
                    }
                }
                let restricted = lie.restrict(sub, 1e-9).unwrap();
                assert!(
                    restricted.is_unimodular(1e-9),
                    "{}: witness {label} must be unimodular",
                    entry.name
                );
                assert_eq!(
                    isomorphism_class(&restricted, 1e-9).as_deref(),
                    Some(*label),
                    "{}: witness class",
                    entry.name
                );
            }
        }
    }

    #[test]
    fn names_resolve_through_unicode_and_aliases() {
        assert_eq!(find_entry("h₃⊕ℝ").unwrap().name, "h3+R");
        assert_eq!(find_entry("ℝ⁴").unwrap().name, "R^4");
        assert_eq!(find_entry("A₄,₆^{α,β}").unwrap().name, "A4,6^{a,b}");
        assert_eq!(find_entry("aff_RR").unwrap().name, "aff_R+aff_R");
        assert_eq!(find_entry("r'₃,μ⊕ℝ").unwrap().name, "r'3,mu+R");
        assert_eq!(find_entry("so(2,1)+R").unwrap().name, "so(2,1)+R");
        assert!(find_entry("so(17)").is_none());
        // Slugs of all names and aliases stay pairwise distinct.
        let mut seen = std::collections::HashSet::new();
        for entry in table_entries() {
            assert!(seen.insert(slug(entry.name)), "{}: slug clash", entry.name);
            for alias in entry.aliases {
                assert!(seen.insert(slug(alias)), "{alias}: alias slug clash");
            }
        }
    }

    #[test]
    fn flag_predicates_follow_the_recorded_notes() {
        let r3p = find_entry("r'3,mu+R").unwrap();
        assert!(r3p.ge_flag_applies(&pm(&[("mu", 1.0)])));
        assert!(!r3p.ge_flag_applies(&pm(&[("mu", 0.5)])));
        let a46 = find_entry("A4,6^{a,b}").unwrap();
        assert!(a46.ge_flag_applies(&pm(&[("alpha", 1.0), ("beta", 0.0)])));
        assert!(!a46.ge_flag_applies(&pm(&[("alpha", 0.5), ("beta", 0.5)])));
        // Entries without notes apply across their domain.
        let plain = find_entry("A4,8").unwrap();
        assert!(plain.ge_flag_applies(&ParamMap::new()));
    }

    #[test]
    fn out_of_domain_parameters_are_rejected() {
        let r3mu = find_entry("r3,mu+R").unwrap();
        assert!(matches!(
            r3mu.algebra_at(&pm(&[("mu", 0.0)])),
            Err(Error::BadParameter { .. })
        ));
        assert!(matches!(
            r3mu.algebra_at(&pm(&[("mu", 2.0)])),
            Err(Error::BadParameter { .. })
        ));
        let a42 = find_entry("A4,2^a").unwrap();
        assert!(matches!(
            a42.algebra_at(&pm(&[("alpha", -2.0)])),
            Err(Error::BadParameter { .. })
        ));
        assert!(matches!(
            a42.algebra_at(&pm(&[("gamma", 1.0)])),
            Err(Error::UnexpectedParameter { .. })
        ));
    }

    #[test]
    fn derived_quantities_cannot_be_supplied() {
        assert!(matches!(
            instantiate_family("aa.H0.lor.iv", &pm(&[("alpha", 1.0), ("beta", 2.0)])),
            Err(Error::UnexpectedParameter { .. })
        ));
        assert!(matches!(
            instantiate_family("aa.Hneq0.4th", &pm(&[("rho", 0.5)])),
            Err(Error::UnexpectedParameter { .. })
        ));
        assert!(matches!(
            instantiate_family("aa.4d.iii", &pm(&[("beta", 1.0)])),
            Err(Error::UnexpectedParameter { .. })
        ));
        assert!(matches!(
            instantiate_family("sig.n22", &ParamMap::new()),
            Err(Error::MissingParameter { .. })
        ));
        assert!(matches!(
            instantiate_family("nonexistent.family", &ParamMap::new()),
            Err(Error::UnknownFamily { .. })
        ));
    }

    #[test]
    fn greek_family_ids_resolve() {
        assert_eq!(family("red.so21.γ").unwrap().family_id, "red.so21.gamma");
        assert_eq!(family("AA.H0.LOR.I").unwrap().family_id, "aa.H0.lor.i");
        assert_eq!(family("aa.hneq0.4th").unwrap().family_id, "aa.Hneq0.4th");
    }

    #[test]
    fn default_instances_are_einstein() {
        for spec in families() {
            let grid = default_grid(spec.family_id).unwrap();
            let first = grid.first().expect("grid nonempty");
            let problem = instantiate_family(spec.family_id, first).unwrap();
            let report = einstein_residuals(&problem);
            assert!(
                report.total < 1e-8,
                "{}: residual {} at {:?}",
                spec.family_id,
                report.total,
                first
            );
        }
    }

    #[test]
    fn torsion_variant_is_the_wedge_form() {
        // Two candidate torsion forms for the four-dimensional family: the
        // wedge (e^1 + e^3) ^ e^2 ^ e^4 against the pair e^12 ^ e^4 +
        // e^13 ^ e^4. Only the wedge variant solves the Einstein equations
        // together with the recorded endomorphism.
        let a = 1.3;
        let (f, _) = spiral_torsion_4d(a).unwrap();
        let metric = ScalarProduct::lorentzian_neg_first(4);
        let lie = almost_abelian_algebra(&f).unwrap();
        let wedge = three_form(4, &[(1, 2, 4, a), (2, 3, 4, -a)]).unwrap();
        let pair = three_form(4, &[(1, 2, 4, a), (1, 3, 4, a)]).unwrap();
        let residual_of = |h: &KForm| -> f64 {
            let p = GEProblem::with_zero_divergence(
                lie.clone(),
                metric.clone(),
                h.clone(),
                TOL,
            )
            .unwrap();
            einstein_residuals(&p).total
        };
        assert!(residual_of(&wedge) < 1e-10, "wedge variant must solve");
        assert!(residual_of(&pair) > 1e-3, "pair variant must fail");
    }

    #[test]
    fn isomorphism_labels_match_recorded_degenerations() {
        assert_eq!(
            isomorphism_label("aa.4d.iv", &pm(&[("v", 0.0)])).unwrap(),
            "h3+R"
        );
        assert_eq!(
            isomorphism_label("aa.4d.vi", &pm(&[("a", 2f64.sqrt())])).unwrap(),
            "h3+R"
        );
        assert_eq!(
            isomorphism_label("aa.4d.ii", &pm(&[("sigma", 0.0)])).unwrap(),
            "A4,1"
        );
        assert_eq!(
            isomorphism_label("aa.4d.ii", &pm(&[("sigma", -1.0)])).unwrap(),
            "e(1,1)+R"
        );
        assert!(matches!(
            isomorphism_label("aa.H0.riem", &ParamMap::new()),
            Err(Error::NoIsomorphismLabel { .. })
        ));
        // Labelled instances agree with the structural classifier where it
        // can decide.
        let p = instantiate_family("aa.4d.ii", &pm(&[("sigma", -1.0)])).unwrap();
        let commutator = p.algebra.commutator_ideal();
        assert_eq!(commutator.dim(), 2);
    }
}
