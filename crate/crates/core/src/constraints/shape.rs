use std::fmt;

use crate::functor::FunctorExpr;

/// Path shapes over the ambient functor `F`:
/// `J ::= Id | F | ∏ J_i | K ∘ J`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathShape {
    Id,
    F,
    Prod(Vec<PathShape>),
    /// `Compose(K, J)` is `K ∘ J`.
    Compose(Box<PathShape>, Box<PathShape>),
}

impl PathShape {
    pub fn compose(outer: PathShape, inner: PathShape) -> PathShape {
        PathShape::Compose(Box::new(outer), Box::new(inner))
    }

    /// `F^n` as a right-nested composite.
    pub fn power(n: usize) -> PathShape {
        match n {
            0 => PathShape::Id,
            1 => PathShape::F,
            _ => PathShape::compose(PathShape::F, PathShape::power(n - 1)),
        }
    }

    /// The functor the shape denotes once `F` is fixed.
    pub fn resolve(&self, ambient: &FunctorExpr) -> FunctorExpr {
        match self {
            PathShape::Id => FunctorExpr::Identity,
            PathShape::F => ambient.clone(),
            PathShape::Prod(parts) => FunctorExpr::Prod(parts.iter().map(|p| p.resolve(ambient)).collect()),
            PathShape::Compose(k, j) => k.resolve(ambient).compose(&j.resolve(ambient)),
        }
    }

    /// `Some(n)` when the shape is `F^n` (built from `F`, `Id` and
    /// composition only).
    pub fn singular_length(&self) -> Option<usize> {
        match self {
            PathShape::Id => Some(0),
            PathShape::F => Some(1),
            PathShape::Prod(_) => None,
            PathShape::Compose(k, j) => Some(k.singular_length()? + j.singular_length()?),
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = match self {
            PathShape::Prod(ps) if ps.len() > 1 => 0,
            PathShape::Compose(..) => 1,
            _ => 2,
        };
        if prec < min {
            f.write_str("(")?;
        }
        match self {
            PathShape::Id => f.write_str("Id")?,
            PathShape::F => f.write_str("F")?,
            PathShape::Prod(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    p.fmt_at(f, 1)?;
                }
            }
            PathShape::Compose(k, j) => {
                k.fmt_at(f, 2)?;
                f.write_str(" . ")?;
                j.fmt_at(f, 1)?;
            }
        }
        if prec < min {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for PathShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// A functor used as a whisker context or constraint target: either a path
/// shape (mentioning the ambient `F`) or a closed functor expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Layer {
    Shape(PathShape),
    Functor(FunctorExpr),
}

impl Layer {
    pub fn pow() -> Layer {
        Layer::Functor(FunctorExpr::powerset())
    }

    pub fn resolve(&self, ambient: &FunctorExpr) -> FunctorExpr {
        match self {
            Layer::Shape(s) => s.resolve(ambient),
            Layer::Functor(f) => f.clone(),
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layer::Shape(s) => write!(f, "{s}"),
            Layer::Functor(e) => write!(f, "{e}"),
        }
    }
}
