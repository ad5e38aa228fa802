//! Number formatting and CSV output.

use std::io::{self, Write};

use num_complex::Complex64;

/// Formats `x` like C's `printf("%.17g", x)`.
pub fn format_g17(x: f64) -> String {
    format_g(x, 17)
}

/// Formats `x` like C's `%.{precision}g`.
pub fn format_g(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let p = precision.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes `gamma,re,im` rows.
pub fn write_complex_csv<W: Write>(
    out: &mut W,
    grid: &[f64],
    values: &[Complex64],
) -> io::Result<()> {
    writeln!(out, "gamma,re,im")?;
    for (g, v) in grid.iter().zip(values) {
        writeln!(out, "{},{},{}", format_g17(*g), format_g17(v.re), format_g17(v.im))?;
    }
    Ok(())
}

/// Writes `x,value` rows.
pub fn write_real_csv<W: Write>(out: &mut W, xs: &[f64], values: &[f64]) -> io::Result<()> {
    writeln!(out, "x,value")?;
    for (x, v) in xs.iter().zip(values) {
        writeln!(out, "{},{}", format_g17(*x), format_g17(*v))?;
    }
    Ok(())
}

/// Serde adapter for `f64` fields that may hold infinities or NaN: finite
/// values are plain numbers, others are the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod extended_f64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&super::format_g17(*x))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("invalid number {other:?}"))),
            },
        }
    }
}
