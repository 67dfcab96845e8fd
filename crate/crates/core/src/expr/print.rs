use super::{BinOp, Expr};

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_ATOM: u8 = 5;

fn op_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Add | BinOp::Sub => PREC_SUM,
        BinOp::Mul | BinOp::Div => PREC_PRODUCT,
    }
}

fn render(e: &Expr) -> (String, u8) {
    match e {
        Expr::Const(v) if v.is_sign_negative() => (format!("{v}"), PREC_UNARY),
        Expr::Const(v) => (format!("{v}"), PREC_ATOM),
        Expr::Named(n) => (n.name().to_string(), PREC_ATOM),
        Expr::Var => ("x".to_string(), PREC_ATOM),
        Expr::Neg(a) => {
            // `-2` would re-parse as a negative literal.
            let inner = match a.as_ref() {
                Expr::Const(v) if !v.is_sign_negative() => format!("({v})"),
                _ => wrap(a, PREC_UNARY),
            };
            (format!("-{inner}"), PREC_UNARY)
        }
        Expr::Binary(op, a, b) => {
            let p = op_prec(*op);
            let lhs = wrap(a, p);
            let rhs = wrap(b, p + 1);
            (format!("{lhs}{}{rhs}", op.symbol()), p)
        }
        Expr::Pow(a, n) => {
            let base = wrap(a, PREC_ATOM);
            let s = if *n < 0 {
                format!("{base}^({n})")
            } else {
                format!("{base}^{n}")
            };
            // A power is never a valid power base without parentheses.
            (s, PREC_UNARY + 1)
        }
        Expr::Call(f, a) => (format!("{}({})", f.name(), render(a).0), PREC_ATOM),
    }
}

fn wrap(e: &Expr, min_prec: u8) -> String {
    let (s, p) = render(e);
    if p >= min_prec {
        s
    } else {
        format!("({s})")
    }
}

pub(super) fn print(e: &Expr) -> String {
    render(e).0
}
