//! Text syntax for functionals:
//!
//! ```text
//! expr  := sqdist(point) | halfsqdist(point) | dist(point) | indicator(set)
//!        | scale(number, expr) | sum(expr, expr, ...) | max(expr, expr, ...)
//! set   := ball(point, number) | segment(point, point)
//! point := [number, ...] | vertex | vertex:vertex:number
//! ```
//!
//! Coordinate points are used by the vector and disk models; tree points are
//! a vertex name or a point at a distance from the first vertex along an edge.

use crate::error::{Error, Result};
use crate::models::{DiskPoint, Euclidean, LpSpace, MetricTree, ModelSpace, PoincareDisk, TreePoint};
use crate::sets::ConvexSet;
use crate::space::GeodesicSpace;

use super::functional::Functional;

#[derive(Debug, Clone, PartialEq)]
pub enum PointLiteral {
    Coords(Vec<f64>),
    Vertex(String),
    /// `u:v:t`, the point at distance `t` from `u` towards `v`.
    Between(String, String, f64),
}

/// Conversion between model points and their text form.
pub trait PointSyntax: ModelSpace + Clone + 'static {
    fn point_from_literal(&self, lit: &PointLiteral) -> Result<Self::Point>;
    fn point_literal(&self, p: &Self::Point) -> String;
}

fn coords(lit: &PointLiteral) -> Result<&[f64]> {
    match lit {
        PointLiteral::Coords(c) => Ok(c),
        other => Err(Error::Parse(format!("expected a coordinate point, found {other:?}"))),
    }
}

fn format_coords(c: &[f64]) -> String {
    let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

impl PointSyntax for Euclidean {
    fn point_from_literal(&self, lit: &PointLiteral) -> Result<Vec<f64>> {
        let p = coords(lit)?.to_vec();
        self.validate(&p)?;
        Ok(p)
    }

    fn point_literal(&self, p: &Vec<f64>) -> String {
        format_coords(p)
    }
}

impl PointSyntax for LpSpace {
    fn point_from_literal(&self, lit: &PointLiteral) -> Result<Vec<f64>> {
        let p = coords(lit)?.to_vec();
        self.validate(&p)?;
        Ok(p)
    }

    fn point_literal(&self, p: &Vec<f64>) -> String {
        format_coords(p)
    }
}

impl PointSyntax for PoincareDisk {
    fn point_from_literal(&self, lit: &PointLiteral) -> Result<DiskPoint> {
        let &[x, y] = coords(lit)? else {
            return Err(Error::Parse("disk points have two coordinates".into()));
        };
        let p = DiskPoint::new(x, y);
        self.validate(&p)?;
        Ok(p)
    }

    fn point_literal(&self, p: &DiskPoint) -> String {
        format_coords(&[p.x, p.y])
    }
}

impl PointSyntax for MetricTree {
    fn point_from_literal(&self, lit: &PointLiteral) -> Result<TreePoint> {
        match lit {
            PointLiteral::Vertex(v) => Ok(self.vertex_point(self.vertex_id(v)?)),
            PointLiteral::Between(u, v, t) => self.point_between(u, v, *t),
            PointLiteral::Coords(_) => Err(Error::Parse("tree points are vertex names or u:v:distance".into())),
        }
    }

    fn point_literal(&self, p: &TreePoint) -> String {
        if let Some(v) = self.as_vertex(p) {
            return self.vertex_name(v).to_string();
        }
        let (u, v) = self.endpoints(p.edge);
        format!("{}:{}:{}", self.vertex_name(u), self.vertex_name(v), p.offset)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Number(f64),
    Punct(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "()[],:".contains(c) {
            out.push((i, Token::Punct(c)));
            i += 1;
        } else if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' {
            let start = i;
            i += 1;
            while i < chars.len()
                && (chars[i].is_ascii_digit()
                    || chars[i] == '.'
                    || chars[i] == 'e'
                    || chars[i] == 'E'
                    || ((chars[i] == '-' || chars[i] == '+') && matches!(chars[i - 1], 'e' | 'E')))
            {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse().map_err(|_| Error::Parse(format!("bad number {s:?} at column {}", start + 1)))?;
            out.push((start, Token::Number(v)));
        } else if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Token::Ident(chars[start..i].iter().collect())));
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} at column {}", i + 1)));
        }
    }
    Ok(out)
}

struct Parser<'a, S: PointSyntax> {
    model: &'a S,
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl<S: PointSyntax> Parser<'_, S> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(usize::MAX, |(c, _)| c + 1)
    }

    fn error<T>(&self, what: &str) -> Result<T> {
        match self.tokens.get(self.pos) {
            Some((c, t)) => Err(Error::Parse(format!("expected {what} at column {}, found {t:?}", c + 1))),
            None => Err(Error::Parse(format!("expected {what}, found end of input"))),
        }
    }

    fn punct(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(&Token::Punct(c)) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(&format!("`{c}`"))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        let hit = self.peek() == Some(&Token::Punct(c));
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn number(&mut self) -> Result<f64> {
        match self.peek() {
            Some(&Token::Number(v)) => {
                self.pos += 1;
                Ok(v)
            }
            _ => self.error("a number"),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Token::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error("a name"),
        }
    }

    fn point(&mut self) -> Result<S::Point> {
        let lit = if self.eat('[') {
            let mut c = vec![self.number()?];
            while self.eat(',') {
                c.push(self.number()?);
            }
            self.punct(']')?;
            PointLiteral::Coords(c)
        } else {
            let u = match self.peek() {
                Some(Token::Number(v)) => {
                    let v = *v;
                    self.pos += 1;
                    v.to_string()
                }
                _ => self.ident()?,
            };
            if self.eat(':') {
                let v = self.ident()?;
                self.punct(':')?;
                PointLiteral::Between(u, v, self.number()?)
            } else {
                PointLiteral::Vertex(u)
            }
        };
        let col = self.column();
        self.model
            .point_from_literal(&lit)
            .map_err(|e| Error::Parse(format!("point before column {col}: {e}")))
    }

    fn set(&mut self) -> Result<ConvexSet<S::Point>> {
        let name = self.ident()?;
        self.punct('(')?;
        let set = match name.as_str() {
            "ball" => {
                let c = self.point()?;
                self.punct(',')?;
                let r = self.number()?;
                ConvexSet::ball(self.model, c, r).map_err(|e| Error::Parse(e.to_string()))?
            }
            "segment" => {
                let a = self.point()?;
                self.punct(',')?;
                ConvexSet::segment(self.model, a, self.point()?)
            }
            other => return Err(Error::Parse(format!("unknown set {other:?}; expected ball or segment"))),
        };
        self.punct(')')?;
        Ok(set)
    }

    fn expr(&mut self) -> Result<Functional<S::Point>> {
        let name = self.ident()?;
        self.punct('(')?;
        let f = match name.as_str() {
            "sqdist" => Functional::SqDist(self.point()?),
            "halfsqdist" => Functional::half_sq_dist_to(self.point()?),
            "dist" => Functional::dist_to(self.point()?),
            "indicator" => Functional::indicator_of(self.set()?),
            "scale" => {
                let c = self.number()?;
                self.punct(',')?;
                Functional::scale(c, self.expr()?).map_err(|e| Error::Parse(e.to_string()))?
            }
            "sum" | "max" => {
                let mut f = self.expr()?;
                self.punct(',')?;
                loop {
                    let g = self.expr()?;
                    f = if name == "sum" { Functional::sum(f, g) } else { Functional::max(f, g) };
                    if !self.eat(',') {
                        break;
                    }
                }
                f
            }
            other => return Err(Error::Parse(format!("unknown functional {other:?}"))),
        };
        self.punct(')')?;
        Ok(f)
    }
}

/// Parses a functional over `model`'s points.
pub fn parse_functional<S: PointSyntax>(model: &S, text: &str) -> Result<Functional<S::Point>> {
    let mut p = Parser { model, tokens: tokenize(text)?, pos: 0 };
    let f = p.expr()?;
    if p.pos != p.tokens.len() {
        return p.error("end of input");
    }
    Ok(f)
}

/// The canonical text of `f`, parseable by [`parse_functional`].
pub fn describe_functional<S: PointSyntax>(model: &S, f: &Functional<S::Point>) -> String {
    f.describe(&|p| model.point_literal(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{parse_edge_list, BUILTIN_TREE};
    use crate::proximal::ExtReal;

    #[test]
    fn parses_the_documented_example() {
        let e = Euclidean::new(2, 3.0).unwrap();
        let f = parse_functional(&e, "sum(scale(0.5, sqdist([1, 0])), indicator(ball([0, 0], 2)))").unwrap();
        assert_eq!(f.eval(&e, &vec![0.0, 0.0]), ExtReal::Finite(0.5));
        assert_eq!(f.eval(&e, &vec![0.0, 3.0]), ExtReal::PosInf);
        assert_eq!(describe_functional(&e, &f), "sum(scale(0.5, sqdist([1, 0])), indicator(ball([0, 0], 2)))");
    }

    #[test]
    fn round_trips_tree_points() {
        let t = MetricTree::from_edges(&parse_edge_list(BUILTIN_TREE).unwrap(), 3.0).unwrap();
        let f = parse_functional(&t, "max(dist(a), halfsqdist(r:b:0.5), indicator(segment(d, g)))").unwrap();
        let text = describe_functional(&t, &f);
        let g = parse_functional(&t, &text).unwrap();
        assert_eq!(describe_functional(&t, &g), text);
        assert_eq!(f.eval(&t, &t.vertex_point(0)), ExtReal::Finite(1.0));
    }

    #[test]
    fn reports_errors() {
        let e = Euclidean::new(2, 3.0).unwrap();
        for bad in ["sqdist([1,0]", "foo([1,0])", "sqdist([1,0,0])", "scale(-1, dist([0,0]))", "dist([0,0]) x", "sum(dist([0,0]))"] {
            assert!(matches!(parse_functional(&e, bad), Err(Error::Parse(_))), "{bad}");
        }
        let d = PoincareDisk::new(0.5).unwrap();
        assert!(parse_functional(&d, "dist([0.9, 0.9])").is_err());
    }
}
