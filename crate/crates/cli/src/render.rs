// Copyright 2026 The ecp Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Number rendering shared by the CSV and table outputs.

/// Renders `x` with 10 significant digits, trailing zeros trimmed, always with a decimal point
/// or exponent. Magnitudes below `1e-5` or at or above `1e15` use exponent notation.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if negative { "-" } else { "" };

    if !(-5..15).contains(&exponent) {
        let (head, tail) = digits.split_at(1);
        let tail = if tail.is_empty() { "0" } else { tail };
        return format!("{sign}{head}.{tail}e{exponent}");
    }
    let body = if exponent < 0 {
        format!("0.{}{}", "0".repeat((-exponent - 1) as usize), digits)
    } else {
        let int_len = exponent as usize + 1;
        if digits.len() <= int_len {
            format!("{}{}.0", digits, "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    };
    format!("{sign}{body}")
}

/// `x` rounded to what [`format_float`] shows.
pub fn round_displayed(x: f64) -> f64 {
    format_float(x).parse().expect("rendered float parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_examples() {
        assert_eq!(format_float(1.0), "1.0");
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(0.0), "0.0");
        assert_eq!(format_float(0.06000000000000001), "0.06");
        assert_eq!(format_float(0.3952941176470588), "0.3952941176");
        assert_eq!(format_float(0.988_235_294_117_647), "0.9882352941");
        assert_eq!(format_float(-2.5), "-2.5");
        assert_eq!(format_float(123456.0), "123456.0");
        assert_eq!(format_float(1.5e-7), "1.5e-7");
        assert_eq!(format_float(2e-17), "2.0e-17");
        assert_eq!(format_float(0.00012345678912), "0.0001234567891");
        assert_eq!(format_float(0.99999999999), "1.0");
    }

    #[test]
    fn round_trip_of_rendering() {
        for x in [0.02, 0.4, 1.0 / 3.0, 7.25e-9] {
            let y = round_displayed(x);
            assert_eq!(format_float(y), format_float(x));
        }
    }
}
