//! Evaluation contexts: a field tower, an etale extension of one, and a
//! truncated series ring.

use crate::error::{CliError, CliResult};
use crate::parse::{eval, parse, Algebra, PolyAlg};
use cartier_core::{
    DifferentialForm, EtaleElement, EtaleExtension, EtaleForm, FieldElement, FieldTower, SeriesRing, TruncatedSeries,
};
use std::sync::Arc;

/// An element or a form over a tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TVal {
    Elem(FieldElement),
    Form(DifferentialForm),
}

impl TVal {
    pub fn into_form(self) -> DifferentialForm {
        match self {
            TVal::Elem(x) => DifferentialForm::function(&x),
            TVal::Form(w) => w,
        }
    }

    pub fn into_element(self) -> CliResult<FieldElement> {
        match self {
            TVal::Elem(x) => Ok(x),
            TVal::Form(w) if w.degree() == 0 => Ok(w.coefficient(&[])),
            TVal::Form(w) => Err(CliError::msg(format!("expected an element, found a degree-{} form", w.degree()))),
        }
    }
}

pub struct TowerAlg {
    pub tower: Arc<FieldTower>,
}

impl TowerAlg {
    fn forms(&self, a: TVal, b: TVal) -> CliResult<(DifferentialForm, DifferentialForm)> {
        let (a, b) = (a.into_form(), b.into_form());
        if a.degree() != b.degree() {
            return Err(CliError::msg(format!("cannot add forms of degrees {} and {}", a.degree(), b.degree())));
        }
        Ok((a, b))
    }
}

impl Algebra for TowerAlg {
    type V = TVal;

    fn int(&self, n: i64) -> CliResult<TVal> {
        Ok(TVal::Elem(FieldElement::from_int(&self.tower, n)))
    }

    fn name(&self, name: &str) -> CliResult<TVal> {
        if name == self.tower.field().generator_name() && !self.tower.field().is_prime_field() {
            return Ok(TVal::Elem(FieldElement::generator(&self.tower)));
        }
        if self.tower.p_basis_index(name).is_some() {
            return Ok(TVal::Elem(FieldElement::variable(&self.tower, name)?));
        }
        Err(CliError::msg(format!("unbound variable '{name}'")))
    }

    fn add(&self, a: TVal, b: TVal) -> CliResult<TVal> {
        match (a, b) {
            (TVal::Elem(x), TVal::Elem(y)) => Ok(TVal::Elem(x.try_add(&y)?)),
            (a, b) => {
                let (a, b) = self.forms(a, b)?;
                Ok(TVal::Form(a.try_add(&b)?))
            }
        }
    }

    fn sub(&self, a: TVal, b: TVal) -> CliResult<TVal> {
        let nb = self.neg(b)?;
        self.add(a, nb)
    }

    fn mul(&self, a: TVal, b: TVal) -> CliResult<TVal> {
        Ok(match (a, b) {
            (TVal::Elem(x), TVal::Elem(y)) => TVal::Elem(x.try_mul(&y)?),
            (TVal::Elem(x), TVal::Form(w)) | (TVal::Form(w), TVal::Elem(x)) => TVal::Form(w.scale(&x)?),
            (TVal::Form(_), TVal::Form(_)) => return Err(CliError::msg("product of two forms; use ^ for the wedge product")),
        })
    }

    fn div(&self, a: TVal, b: TVal) -> CliResult<TVal> {
        let TVal::Elem(y) = b else {
            return Err(CliError::msg("cannot divide by a form"));
        };
        Ok(match a {
            TVal::Elem(x) => TVal::Elem(x.try_div(&y)?),
            TVal::Form(w) => TVal::Form(w.scale(&y.inv(None)?)?),
        })
    }

    fn neg(&self, a: TVal) -> CliResult<TVal> {
        Ok(match a {
            TVal::Elem(x) => TVal::Elem(-&x),
            TVal::Form(w) => TVal::Form(w.neg()),
        })
    }

    fn pow(&self, a: TVal, n: i64) -> CliResult<TVal> {
        match a {
            TVal::Elem(x) => Ok(TVal::Elem(x.pow(n)?)),
            TVal::Form(_) => Err(CliError::msg("power of a form")),
        }
    }

    fn wedge(&self, a: TVal, b: TVal) -> CliResult<TVal> {
        Ok(TVal::Form(a.into_form().wedge(&b.into_form())?))
    }

    fn big_o(&self, var: &str, n: i64) -> CliResult<TVal> {
        let idx = self
            .tower
            .laurent_vars()
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| CliError::msg(format!("'{var}' is not a Laurent variable")))?;
        Ok(TVal::Elem(FieldElement::big_o(&self.tower, idx + 1, n)?))
    }

    fn call(&self, name: &str, args: Vec<TVal>) -> CliResult<TVal> {
        let [arg] = <[TVal; 1]>::try_from(args).map_err(|_| CliError::msg(format!("{name} takes one argument")))?;
        match name {
            "dlog" => Ok(TVal::Form(DifferentialForm::dlog(&arg.into_element()?)?)),
            "d" => Ok(TVal::Form(arg.into_form().d())),
            _ => Err(CliError::msg(format!("unknown function '{name}'"))),
        }
    }
}

pub fn parse_element(tower: &Arc<FieldTower>, src: &str) -> CliResult<FieldElement> {
    eval(&TowerAlg { tower: tower.clone() }, &parse(src)?)?.into_element()
}

pub fn parse_form(tower: &Arc<FieldTower>, src: &str) -> CliResult<DifferentialForm> {
    Ok(eval(&TowerAlg { tower: tower.clone() }, &parse(src)?)?.into_form())
}

/// Coefficients, constant term first, of a polynomial in `var` over `tower`.
pub fn parse_tower_polynomial(tower: &Arc<FieldTower>, var: &str, src: &str) -> CliResult<Vec<FieldElement>> {
    let inner = TowerAlg { tower: tower.clone() };
    let alg = PolyAlg { inner: &inner, var: var.to_string() };
    eval(&alg, &parse(src)?)?.into_iter().map(TVal::into_element).collect()
}

/// An element or a form over an etale extension.
#[derive(Clone, Debug)]
pub enum EVal {
    Elem(EtaleElement),
    Form(EtaleForm),
}

pub struct EtaleAlg {
    pub ext: Arc<EtaleExtension>,
}

impl EtaleAlg {
    fn form(&self, v: EVal) -> EtaleForm {
        match v {
            EVal::Elem(x) => EtaleForm::function(&x),
            EVal::Form(w) => w,
        }
    }

    /// The base-field element `x` represents, if any.
    fn base_value(&self, x: &EtaleElement) -> Option<FieldElement> {
        let c = x.coefficients();
        if c.iter().skip(1).all(|y| y.is_zero()) {
            Some(c.first().cloned().unwrap_or_else(|| FieldElement::zero(self.ext.base())))
        } else {
            None
        }
    }
}

impl Algebra for EtaleAlg {
    type V = EVal;

    fn int(&self, n: i64) -> CliResult<EVal> {
        Ok(EVal::Elem(self.ext.lift(&FieldElement::from_int(self.ext.base(), n))?))
    }

    fn name(&self, name: &str) -> CliResult<EVal> {
        if name == self.ext.name() {
            return Ok(EVal::Elem(self.ext.generator()));
        }
        let base = TowerAlg { tower: self.ext.base().clone() };
        Ok(EVal::Elem(self.ext.lift(&base.name(name)?.into_element()?)?))
    }

    fn add(&self, a: EVal, b: EVal) -> CliResult<EVal> {
        match (a, b) {
            (EVal::Elem(x), EVal::Elem(y)) => Ok(EVal::Elem(x.try_add(&y)?)),
            (a, b) => Ok(EVal::Form(self.form(a).try_add(&self.form(b))?)),
        }
    }

    fn sub(&self, a: EVal, b: EVal) -> CliResult<EVal> {
        let nb = self.neg(b)?;
        self.add(a, nb)
    }

    fn mul(&self, a: EVal, b: EVal) -> CliResult<EVal> {
        Ok(match (a, b) {
            (EVal::Elem(x), EVal::Elem(y)) => EVal::Elem(x.try_mul(&y)?),
            (EVal::Elem(x), EVal::Form(w)) | (EVal::Form(w), EVal::Elem(x)) => EVal::Form(w.scale(&x)?),
            (EVal::Form(_), EVal::Form(_)) => return Err(CliError::msg("product of two forms; use ^ for the wedge product")),
        })
    }

    fn div(&self, a: EVal, b: EVal) -> CliResult<EVal> {
        let EVal::Elem(y) = b else {
            return Err(CliError::msg("cannot divide by a form"));
        };
        let c = self
            .base_value(&y)
            .ok_or_else(|| CliError::msg("division in the extension is only supported by base-field elements"))?;
        let inv = self.ext.lift(&c.inv(None)?)?;
        self.mul(a, EVal::Elem(inv))
    }

    fn neg(&self, a: EVal) -> CliResult<EVal> {
        Ok(match a {
            EVal::Elem(x) => EVal::Elem(x.neg()),
            EVal::Form(w) => EVal::Form(w.scale(&self.ext.lift(&FieldElement::from_int(self.ext.base(), -1))?)?),
        })
    }

    fn pow(&self, a: EVal, n: i64) -> CliResult<EVal> {
        let EVal::Elem(x) = a else {
            return Err(CliError::msg("power of a form"));
        };
        if n >= 0 {
            return Ok(EVal::Elem(x.pow(n as u64)));
        }
        let c = self
            .base_value(&x)
            .ok_or_else(|| CliError::msg("negative powers in the extension are only supported for base-field elements"))?;
        Ok(EVal::Elem(self.ext.lift(&c.pow(n)?)?))
    }

    fn wedge(&self, a: EVal, b: EVal) -> CliResult<EVal> {
        Ok(EVal::Form(self.form(a).wedge(&self.form(b))?))
    }

    fn call(&self, name: &str, args: Vec<EVal>) -> CliResult<EVal> {
        let [arg] = <[EVal; 1]>::try_from(args).map_err(|_| CliError::msg(format!("{name} takes one argument")))?;
        match name {
            "dlog" => {
                let EVal::Elem(x) = arg else {
                    return Err(CliError::msg("dlog of a form"));
                };
                let c = self
                    .base_value(&x)
                    .ok_or_else(|| CliError::msg("dlog in the extension is only supported for base-field elements"))?;
                Ok(EVal::Form(EtaleForm::lift(&self.ext, &DifferentialForm::dlog(&c)?)?))
            }
            "d" => Ok(EVal::Form(self.form(arg).d())),
            _ => Err(CliError::msg(format!("unknown function '{name}'"))),
        }
    }
}

pub fn parse_etale_form(ext: &Arc<EtaleExtension>, src: &str) -> CliResult<EtaleForm> {
    let alg = EtaleAlg { ext: ext.clone() };
    let v = eval(&alg, &parse(src)?)?;
    Ok(alg.form(v))
}

pub struct SeriesAlg {
    pub ring: Arc<SeriesRing>,
}

impl Algebra for SeriesAlg {
    type V = TruncatedSeries;

    fn int(&self, n: i64) -> CliResult<TruncatedSeries> {
        Ok(TruncatedSeries::from_int(&self.ring, n))
    }

    fn name(&self, name: &str) -> CliResult<TruncatedSeries> {
        let f = self.ring.field();
        if name == f.generator_name() && !f.is_prime_field() {
            return Ok(TruncatedSeries::constant(&self.ring, f.generator()));
        }
        if self.ring.var_index(name).is_some() {
            return Ok(TruncatedSeries::variable(&self.ring, name)?);
        }
        Err(CliError::msg(format!("unbound variable '{name}'")))
    }

    fn add(&self, a: TruncatedSeries, b: TruncatedSeries) -> CliResult<TruncatedSeries> {
        Ok(a.try_add(&b)?)
    }

    fn sub(&self, a: TruncatedSeries, b: TruncatedSeries) -> CliResult<TruncatedSeries> {
        Ok(a.try_sub(&b)?)
    }

    fn mul(&self, a: TruncatedSeries, b: TruncatedSeries) -> CliResult<TruncatedSeries> {
        Ok(a.try_mul(&b)?)
    }

    fn div(&self, a: TruncatedSeries, b: TruncatedSeries) -> CliResult<TruncatedSeries> {
        if !b.is_unit() {
            return Err(CliError::msg("division by a non-unit series"));
        }
        Ok(a.try_mul(&b.inv()?)?)
    }

    fn neg(&self, a: TruncatedSeries) -> CliResult<TruncatedSeries> {
        Ok(a.neg())
    }

    fn pow(&self, a: TruncatedSeries, n: i64) -> CliResult<TruncatedSeries> {
        if n >= 0 {
            return Ok(a.pow(n as u64));
        }
        if !a.is_unit() {
            return Err(CliError::msg("negative power of a non-unit series"));
        }
        Ok(a.inv()?.pow(n.unsigned_abs()))
    }
}

pub fn parse_series(ring: &Arc<SeriesRing>, src: &str) -> CliResult<TruncatedSeries> {
    eval(&SeriesAlg { ring: ring.clone() }, &parse(src)?)
}

/// Coefficients, constant term first, of a polynomial in `var` over `ring`.
pub fn parse_series_polynomial(ring: &Arc<SeriesRing>, var: &str, src: &str) -> CliResult<Vec<TruncatedSeries>> {
    if ring.var_index(var).is_some() {
        return Err(CliError::usage(format!("'{var}' is already a variable of {}", ring.descriptor())));
    }
    let inner = SeriesAlg { ring: ring.clone() };
    eval(&PolyAlg { inner: &inner, var: var.to_string() }, &parse(src)?)
}
