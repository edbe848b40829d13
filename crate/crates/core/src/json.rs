//! Canonical JSON output: compact, keys in declaration order, every float
//! printed with 17 significant digits so that text output is byte-stable and
//! parses back to the identical `f64`.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

/// Formats a finite float with 17 significant digits.
///
/// Positional notation is used for decimal exponents in `-5..=16`,
/// scientific otherwise.
pub fn format_f64(value: f64) -> String {
    if !value.is_finite() {
        return "null".to_string();
    }
    let sci = format!("{value:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..=16).contains(&exp) {
        return format!("{mantissa}e{exp}");
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let mut out = String::from(sign);
    if exp < 0 {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    } else {
        let int_len = exp as usize + 1;
        out.push_str(&digits[..int_len]);
        out.push('.');
        if int_len < digits.len() {
            out.push_str(&digits[int_len..]);
        } else {
            out.push('0');
        }
    }
    out
}

/// A serde_json formatter emitting floats through [`format_f64`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Sig17Formatter;

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` to canonical compact JSON.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17Formatter);
    value
        .serialize(&mut ser)
        .expect("serializing to an in-memory buffer cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
