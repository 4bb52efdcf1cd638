//! Tiny evaluator for angle expressions such as `3*pi/4`, `-pi/8` or
//! `0.25`. Supports `+ - * /`, unary minus, parentheses, real literals with
//! exponents and the constant `pi`.

use std::f64::consts::PI;

pub(crate) fn eval_angle(src: &str) -> Result<f64, String> {
    let mut p = Parser {
        chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
    };
    if p.chars.is_empty() {
        return Err("empty angle expression".into());
    }
    let v = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(format!("unexpected {:?} in angle {src:?}", p.chars[p.pos]));
    }
    if !v.is_finite() {
        return Err(format!("angle {src:?} is not finite"));
    }
    Ok(v)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' { acc * rhs } else { acc / rhs };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err("missing ')'".into());
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                    self.pos += 1;
                }
                let word: String = self.chars[start..self.pos].iter().collect();
                match word.as_str() {
                    "pi" => Ok(PI),
                    _ => Err(format!("unknown identifier {word:?}")),
                }
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                if matches!(self.peek(), Some('e' | 'E')) {
                    self.pos += 1;
                    if matches!(self.peek(), Some('+' | '-')) {
                        self.pos += 1;
                    }
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                text.parse::<f64>()
                    .map_err(|_| format!("bad number {text:?}"))
            }
            Some(c) => Err(format!("unexpected {c:?}")),
            None => Err("unexpected end of angle expression".into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_pi_multiples() {
        assert_eq!(eval_angle("pi").unwrap(), PI);
        assert_eq!(eval_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(eval_angle("-pi/8").unwrap(), -PI / 8.0);
        assert_eq!(eval_angle("2 * (pi - 1)").unwrap(), 2.0 * (PI - 1.0));
        assert_eq!(eval_angle("1.5e-3").unwrap(), 1.5e-3);
        assert_eq!(eval_angle("0.5").unwrap(), 0.5);
    }

    #[test]
    fn rejects_garbage() {
        assert!(eval_angle("").is_err());
        assert!(eval_angle("tau").is_err());
        assert!(eval_angle("1/").is_err());
        assert!(eval_angle("(1").is_err());
        assert!(eval_angle("1/0").is_err());
        assert!(eval_angle("0.5x").is_err());
    }
}
