//! Flag value parsers.

use superbroadcast::Complex64;

/// Parse `a+bi` style complex numbers: `1`, `-0.5`, `2i`, `-i`, `1-2.5i`,
/// `1e-3+4e-1i`.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex number".into());
    }
    let number = |part: &str| -> Result<f64, String> {
        part.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("invalid number {part:?} in {s:?}"))
    };
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(number(&t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (number(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => number(other)?,
    };
    Ok(Complex64::new(re, im))
}

/// Parse `start:stop[:step]`. `stop` is included when `stop − start` is a
/// whole number of steps, excluded otherwise.
pub fn float_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| {
        p.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("invalid range bound {p:?} in {s:?}"))
    };
    let (start, stop, step) = match parts.as_slice() {
        [a] => {
            let v = num(a)?;
            (v, v, 1.0)
        }
        [a, b] => (num(a)?, num(b)?, 1.0),
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => return Err(format!("range {s:?} is not start:stop[:step]")),
    };
    if step <= 0.0 {
        return Err(format!("range {s:?} needs a positive step"));
    }
    if stop < start {
        return Err(format!("range {s:?} is empty"));
    }
    let steps = (stop - start) / step;
    let whole = steps.round();
    let count = if (steps - whole).abs() <= 1e-9 * whole.max(1.0) {
        whole as usize + 1
    } else {
        steps.ceil() as usize
    };
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

/// Integer version of [`float_range`].
pub fn int_range(s: &str) -> Result<Vec<usize>, String> {
    let values = float_range(s)?;
    values
        .iter()
        .map(|&v| {
            (v >= 0.0 && v.fract() == 0.0)
                .then_some(v as usize)
                .ok_or_else(|| format!("range {s:?} must hold non-negative integers"))
        })
        .collect()
}
