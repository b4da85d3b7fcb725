//! Text and LaTeX rendering.

use std::str::FromStr;

use crate::ck::Forest;
use crate::hopf::representative;
use crate::lincomb::{LinComb, Tensor};
use crate::loops::LoopGraph;
use crate::perm::Perm;
use crate::quantize::HSeries;
use crate::scalar::Scalar;
use crate::toprec::{CorrExpr, CorrFactor, CorrRef, KernelStep, Monomial, Symmetrized};
use crate::tree::Tree;

use super::json::Json;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Json,
    Latex,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "latex" => Ok(Format::Latex),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

pub trait Render {
    fn text(&self) -> String;
    fn latex(&self) -> String;
}

/// Render in any format.
pub fn render<T: Render + Json>(x: &T, format: Format) -> String {
    match format {
        Format::Text => x.text(),
        Format::Json => x.to_json().to_string(),
        Format::Latex => x.latex(),
    }
}

/// How an element is named inside a linear combination or tensor.
pub trait BasisName {
    fn name(&self) -> String;
    fn latex_name(&self) -> String;
}

/// `e` for `|`, otherwise the least permutation of the fiber: `(132)`.
pub fn tree_name(t: &Tree) -> String {
    if t.is_leaf() {
        "e".into()
    } else {
        format!("({})", representative(t))
    }
}

impl BasisName for Tree {
    fn name(&self) -> String {
        tree_name(self)
    }

    fn latex_name(&self) -> String {
        if self.is_leaf() {
            "|".into()
        } else {
            format!("\\mathbf{{({})}}", representative(self))
        }
    }
}

impl BasisName for Perm {
    fn name(&self) -> String {
        format!("({self})")
    }

    fn latex_name(&self) -> String {
        format!("({self})")
    }
}

impl BasisName for LoopGraph {
    fn name(&self) -> String {
        self.to_string()
    }

    fn latex_name(&self) -> String {
        graph_latex(self)
    }
}

impl BasisName for Forest {
    fn name(&self) -> String {
        self.to_string()
    }

    fn latex_name(&self) -> String {
        forest_latex(self)
    }
}

impl BasisName for Monomial {
    fn name(&self) -> String {
        self.to_string()
    }

    fn latex_name(&self) -> String {
        self.latex()
    }
}

impl BasisName for CorrFactor {
    fn name(&self) -> String {
        self.to_string()
    }

    fn latex_name(&self) -> String {
        match self {
            CorrFactor::Unit => "1".into(),
            CorrFactor::Ref(r) => r.latex(),
        }
    }
}

impl<B: BasisName> BasisName for Tensor<B> {
    fn name(&self) -> String {
        self.0.iter().map(BasisName::name).collect::<Vec<_>>().join(" (x) ")
    }

    fn latex_name(&self) -> String {
        self.0.iter().map(BasisName::latex_name).collect::<Vec<_>>().join("\\otimes ")
    }
}

impl<B: BasisName + Ord + Clone, R: Scalar> Render for LinComb<B, R> {
    fn text(&self) -> String {
        self.render_with(BasisName::name)
    }

    fn latex(&self) -> String {
        self.render_with(BasisName::latex_name).replace('*', "")
    }
}

impl Render for Tree {
    fn text(&self) -> String {
        self.to_string()
    }

    fn latex(&self) -> String {
        self.latex_name()
    }
}

impl Render for Perm {
    fn text(&self) -> String {
        self.to_string()
    }

    fn latex(&self) -> String {
        self.to_string()
    }
}

fn graph_latex(g: &LoopGraph) -> String {
    let base = g.base().latex_name();
    if g.loops().is_empty() {
        return base;
    }
    let loops: String = g.loops().iter().map(|(a, b)| format!("({a},{b})")).collect();
    format!("{base}^{{{loops}}}")
}

impl Render for LoopGraph {
    fn text(&self) -> String {
        self.to_string()
    }

    fn latex(&self) -> String {
        graph_latex(self)
    }
}

fn forest_latex(f: &Forest) -> String {
    f.to_string().replace('•', "\\bullet ").replace('∅', "\\emptyset")
}

impl Render for Forest {
    fn text(&self) -> String {
        self.to_string()
    }

    fn latex(&self) -> String {
        forest_latex(self)
    }
}

impl Render for CorrRef {
    fn text(&self) -> String {
        self.to_string()
    }

    fn latex(&self) -> String {
        CorrRef::latex(self)
    }
}

impl Render for CorrExpr {
    fn text(&self) -> String {
        self.to_string()
    }

    fn latex(&self) -> String {
        self.monomial().latex()
    }
}

impl<R: Scalar> Render for KernelStep<R> {
    fn text(&self) -> String {
        self.to_string()
    }

    fn latex(&self) -> String {
        KernelStep::latex(self)
    }
}

impl<R: Scalar> Render for HSeries<R> {
    fn text(&self) -> String {
        self.to_string()
    }

    fn latex(&self) -> String {
        let parts: Vec<String> = self
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| match g {
                0 => c.latex(),
                1 => format!("h\\left({}\\right)", c.latex()),
                _ => format!("h^{{{g}}}\\left({}\\right)", c.latex()),
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

/// The representative sum with the symmetrized labels listed.
pub fn symmetrized_text<R: Scalar>(s: &Symmetrized<R>) -> String {
    let labels: Vec<String> = s.symmetric.iter().map(|l| l.to_string()).collect();
    format!("sym[{}]({})", labels.join(","), s.representative.text())
}
