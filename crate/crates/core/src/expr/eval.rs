//! Jet and plain-value evaluation of expression trees.

use super::jet::{self, Jet};
use super::{BinOp, Func, Node};
use crate::error::EvalError;

pub fn eval_jet(root: &Node, point: f64) -> Result<Jet, EvalError> {
    let jet = jet_of(root, point)?;
    if !jet.is_finite() {
        return Err(EvalError::NonFinite {
            node: root.to_string(),
            point,
        });
    }
    Ok(jet)
}

pub fn eval_value(root: &Node, point: f64) -> Result<f64, EvalError> {
    let v = value_of(root, point)?;
    if !v.is_finite() {
        return Err(EvalError::NonFinite {
            node: root.to_string(),
            point,
        });
    }
    Ok(v)
}

fn domain(node: &Node, point: f64, detail: &str) -> EvalError {
    EvalError::Domain {
        node: node.to_string(),
        point,
        detail: detail.to_string(),
    }
}

fn jet_of(node: &Node, x: f64) -> Result<Jet, EvalError> {
    match node {
        Node::Constant(v) => Ok(Jet::constant(*v)),
        Node::Variable => Ok(Jet::variable(x)),
        Node::Neg(inner) => Ok(-jet_of(inner, x)?),
        Node::Binary(op, l, r) => {
            let a = jet_of(l, x)?;
            match op {
                BinOp::Add => Ok(a + jet_of(r, x)?),
                BinOp::Sub => Ok(a - jet_of(r, x)?),
                BinOp::Mul => Ok(a * jet_of(r, x)?),
                BinOp::Div => {
                    let b = jet_of(r, x)?;
                    a.div_checked(&b)
                        .ok_or_else(|| domain(node, x, "division by zero"))
                }
                BinOp::Pow => pow_jet(node, a, r, x),
            }
        }
        Node::Call(func, arg) => {
            let u = jet_of(arg, x)?;
            call_jet(node, *func, u, x)
        }
    }
}

/// `^` splits three ways: a constant integer exponent works for any base via
/// repeated squaring, a constant fractional exponent needs a positive base,
/// and a variable exponent is `exp(r · log(base))`, also positive-base only.
fn pow_jet(node: &Node, base: Jet, exp_node: &Node, x: f64) -> Result<Jet, EvalError> {
    match const_fold(exp_node) {
        Some(r) if r.fract() == 0.0 && r.abs() <= 2147483647.0 => {
            if r < 0.0 && base.value() == 0.0 {
                return Err(domain(node, x, "zero base with negative exponent"));
            }
            base.powi(r as i64)
                .ok_or_else(|| domain(node, x, "zero base with negative exponent"))
        }
        Some(r) => {
            if base.value() <= 0.0 {
                return Err(domain(node, x, "nonpositive base with non-integer exponent"));
            }
            Ok(base.compose_outer(jet::outer_powf(base.value(), r)))
        }
        None => {
            if base.value() <= 0.0 {
                return Err(domain(node, x, "nonpositive base with variable exponent"));
            }
            let e = jet_of(exp_node, x)?;
            let ln = base.compose_outer(jet::outer_log(base.value()));
            let prod = e * ln;
            Ok(prod.compose_outer(jet::outer_exp(prod.value())))
        }
    }
}

fn call_jet(node: &Node, func: Func, u: Jet, x: f64) -> Result<Jet, EvalError> {
    let u0 = u.value();
    let jet = match func {
        Func::Sin => u.compose_outer(jet::outer_sin(u0)),
        Func::Cos => u.compose_outer(jet::outer_cos(u0)),
        Func::Tan => {
            let s = u.compose_outer(jet::outer_sin(u0));
            let c = u.compose_outer(jet::outer_cos(u0));
            s.div_checked(&c)
                .ok_or_else(|| domain(node, x, "tangent pole"))?
        }
        Func::Sinh => u.compose_outer(jet::outer_sinh(u0)),
        Func::Cosh => u.compose_outer(jet::outer_cosh(u0)),
        Func::Tanh => {
            let s = u.compose_outer(jet::outer_sinh(u0));
            let c = u.compose_outer(jet::outer_cosh(u0));
            s.div_checked(&c)
                .ok_or_else(|| domain(node, x, "tanh overflow"))?
        }
        Func::Exp => u.compose_outer(jet::outer_exp(u0)),
        Func::Log => {
            if u0 <= 0.0 {
                return Err(domain(node, x, "log of nonpositive value"));
            }
            u.compose_outer(jet::outer_log(u0))
        }
        Func::Sqrt => {
            if u0 <= 0.0 {
                return Err(domain(node, x, "sqrt needs a positive argument"));
            }
            u.compose_outer(jet::outer_sqrt(u0))
        }
        Func::Abs => {
            if u0 == 0.0 {
                return Err(domain(node, x, "abs is not differentiable at 0"));
            } else if u0 > 0.0 {
                u
            } else {
                -u
            }
        }
        Func::Asin => {
            if u0.abs() >= 1.0 {
                return Err(domain(node, x, "asin argument outside (-1, 1)"));
            }
            u.compose_outer(jet::outer_asin(u0))
        }
        Func::Acos => {
            if u0.abs() >= 1.0 {
                return Err(domain(node, x, "acos argument outside (-1, 1)"));
            }
            u.compose_outer(jet::outer_acos(u0))
        }
        Func::Atan => u.compose_outer(jet::outer_atan(u0)),
    };
    Ok(jet)
}

fn value_of(node: &Node, x: f64) -> Result<f64, EvalError> {
    match node {
        Node::Constant(v) => Ok(*v),
        Node::Variable => Ok(x),
        Node::Neg(inner) => Ok(-value_of(inner, x)?),
        Node::Binary(op, l, r) => {
            let a = value_of(l, x)?;
            match op {
                BinOp::Add => Ok(a + value_of(r, x)?),
                BinOp::Sub => Ok(a - value_of(r, x)?),
                BinOp::Mul => Ok(a * value_of(r, x)?),
                BinOp::Div => {
                    let b = value_of(r, x)?;
                    if b == 0.0 {
                        return Err(domain(node, x, "division by zero"));
                    }
                    Ok(a / b)
                }
                BinOp::Pow => match const_fold(r) {
                    Some(p) if p.fract() == 0.0 && p.abs() <= 2147483647.0 => {
                        if p < 0.0 && a == 0.0 {
                            return Err(domain(node, x, "zero base with negative exponent"));
                        }
                        Ok(a.powi(p as i32))
                    }
                    Some(p) => {
                        if a <= 0.0 {
                            return Err(domain(node, x, "nonpositive base with non-integer exponent"));
                        }
                        Ok(a.powf(p))
                    }
                    None => {
                        if a <= 0.0 {
                            return Err(domain(node, x, "nonpositive base with variable exponent"));
                        }
                        let b = value_of(r, x)?;
                        Ok((b * a.ln()).exp())
                    }
                },
            }
        }
        Node::Call(func, arg) => {
            let u = value_of(arg, x)?;
            match func {
                Func::Log if u <= 0.0 => Err(domain(node, x, "log of nonpositive value")),
                Func::Sqrt if u < 0.0 => Err(domain(node, x, "sqrt of negative value")),
                Func::Asin | Func::Acos if u.abs() > 1.0 => {
                    Err(domain(node, x, "inverse sine/cosine argument outside [-1, 1]"))
                }
                Func::Tan if u.cos() == 0.0 => Err(domain(node, x, "tangent pole")),
                _ => Ok(func.apply(u)),
            }
        }
    }
}

/// Evaluate a variable-free subtree, used to recognize constant exponents.
/// Returns `None` when the subtree mentions `x` or folds to a non-finite value.
fn const_fold(node: &Node) -> Option<f64> {
    let v = match node {
        Node::Constant(v) => *v,
        Node::Variable => return None,
        Node::Neg(inner) => -const_fold(inner)?,
        Node::Binary(op, l, r) => {
            let a = const_fold(l)?;
            let b = const_fold(r)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => a.powf(b),
            }
        }
        Node::Call(func, arg) => func.apply(const_fold(arg)?),
    };
    v.is_finite().then_some(v)
}
