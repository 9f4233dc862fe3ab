//! Parsing and formatting of bra-ket state expressions.
//!
//! The accepted grammar (whitespace between tokens is insignificant):
//!
//! ```text
//! expr     := sign? term (('+' | '-') term)*
//! term     := coeff ket | coeff '(' expr ')' | ket | '(' expr ')'
//! ket      := '|' bit+ '>'
//! coeff    := sign? magnitude 'i'? | sign? 'i'
//! magnitude:= number ('/' number)?
//!           | number '/' 'sqrt' '(' number ')'
//!           | 'sqrt' '(' number ')' ('/' number)?
//! number   := digit+ ('.' digit+)?
//! ```
//!
//! Examples: `|00>`, `1/sqrt(2)(|0000> + |1111>)`, `0.5|01> - 0.5i|10>`.
//! A coefficient in front of a parenthesized sum multiplies every term in
//! it, and kets may appear more than once; repeated bitstrings accumulate
//! by coefficient addition. All kets in one expression must have the same
//! number of bits, and the evaluated amplitudes must be normalized to
//! within 1e-6 unless auto-normalization is requested.

use num_complex::Complex64;
use thiserror::Error;

use crate::state::PureState;

/// Deepest allowed parenthesis nesting; guards recursion on hostile input.
const MAX_DEPTH: usize = 32;

/// Accepted deviation of the evaluated squared norm from one. Looser than
/// the state-level tolerance so that expressions written with rounded
/// decimal coefficients still parse; accepted states are then renormalized
/// exactly.
pub const PARSE_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("ket at byte {position} has {found} bit(s), but an earlier ket has {expected}")]
    MixedArity {
        position: usize,
        expected: usize,
        found: usize,
    },
    #[error(
        "expression is not normalized: sum of squared amplitudes is {norm_sqr} \
         (request auto-normalization to accept)"
    )]
    NotNormalized { norm_sqr: f64 },
    #[error("expression evaluates to the zero vector")]
    ZeroVector,
}

/// A parsed expression: merged `(coefficient, bitstring)` terms plus the
/// common ket width. Evaluation to a [`PureState`] is a separate step so
/// callers can decide how to treat non-normalized input.
#[derive(Debug, Clone, PartialEq)]
pub struct KetExpression {
    terms: Vec<(Complex64, String)>,
    num_qubits: usize,
}

impl KetExpression {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut parser = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let mut raw = Vec::new();
        parser.expression(Complex64::new(1.0, 0.0), 0, &mut raw)?;
        parser.skip_ws();
        if parser.pos < parser.src.len() {
            return Err(parser.syntax("end of input, '+' or '-'"));
        }

        // Merge repeated bitstrings by coefficient addition.
        let mut terms: Vec<(Complex64, String)> = Vec::new();
        let mut num_qubits = 0;
        for (coeff, bits, at) in raw {
            if num_qubits == 0 {
                num_qubits = bits.len();
            } else if bits.len() != num_qubits {
                return Err(ParseError::MixedArity {
                    position: at,
                    expected: num_qubits,
                    found: bits.len(),
                });
            }
            match terms.iter_mut().find(|(_, b)| *b == bits) {
                Some((c, _)) => *c += coeff,
                None => terms.push((coeff, bits)),
            }
        }
        Ok(Self { terms, num_qubits })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Merged terms in first-occurrence order.
    pub fn terms(&self) -> &[(Complex64, String)] {
        &self.terms
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm_sqr()).sum()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.num_qubits];
        for (coeff, bits) in &self.terms {
            let index = bits
                .bytes()
                .fold(0usize, |acc, b| (acc << 1) | usize::from(b == b'1'));
            amps[index] += coeff;
        }
        amps
    }

    /// Evaluate, rejecting input whose squared norm strays from one by more
    /// than [`PARSE_NORM_TOL`]. Accepted amplitudes are divided by their
    /// exact norm so the resulting state satisfies the tighter state-level
    /// invariant.
    pub fn to_state(&self) -> Result<PureState, ParseError> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > PARSE_NORM_TOL {
            return Err(ParseError::NotNormalized { norm_sqr });
        }
        self.normalized_state()
    }

    /// Evaluate, normalizing whatever norm the input has.
    pub fn to_state_normalized(&self) -> Result<PureState, ParseError> {
        self.normalized_state()
    }

    fn normalized_state(&self) -> Result<PureState, ParseError> {
        PureState::normalized(self.amplitudes(), self.num_qubits)
            .map_err(|_| ParseError::ZeroVector)
    }
}

/// Parse an expression and evaluate it as a normalized state, rejecting
/// input that is not already normalized to within [`PARSE_NORM_TOL`].
pub fn parse_ket_expression(text: &str) -> Result<PureState, ParseError> {
    KetExpression::parse(text)?.to_state()
}

/// Parse an expression and normalize whatever it evaluates to.
pub fn parse_ket_expression_normalized(text: &str) -> Result<PureState, ParseError> {
    KetExpression::parse(text)?.to_state_normalized()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn syntax(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            position: self.pos,
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expression(
        &mut self,
        multiplier: Complex64,
        depth: usize,
        out: &mut Vec<(Complex64, String, usize)>,
    ) -> Result<(), ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.syntax("shallower nesting"));
        }
        self.skip_ws();
        let mut sign = 1.0;
        if self.eat(b'-') {
            sign = -1.0;
        } else {
            let _ = self.eat(b'+');
        }
        loop {
            self.term(multiplier * sign, depth, out)?;
            self.skip_ws();
            if self.eat(b'+') {
                sign = 1.0;
            } else if self.eat(b'-') {
                sign = -1.0;
            } else {
                return Ok(());
            }
        }
    }

    fn term(
        &mut self,
        multiplier: Complex64,
        depth: usize,
        out: &mut Vec<(Complex64, String, usize)>,
    ) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'|') => {
                let (bits, at) = self.ket()?;
                out.push((multiplier, bits, at));
                Ok(())
            }
            Some(b'(') => {
                self.pos += 1;
                self.expression(multiplier, depth + 1, out)?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(self.syntax("')'"));
                }
                Ok(())
            }
            Some(b)
                if b == b'i'
                    || b == b's'
                    || b == b'.'
                    || b.is_ascii_digit()
                    || b == b'+'
                    || b == b'-' =>
            {
                let coeff = self.coefficient()?;
                self.skip_ws();
                match self.peek() {
                    Some(b'|') => {
                        let (bits, at) = self.ket()?;
                        out.push((multiplier * coeff, bits, at));
                        Ok(())
                    }
                    Some(b'(') => {
                        self.pos += 1;
                        self.expression(multiplier * coeff, depth + 1, out)?;
                        self.skip_ws();
                        if !self.eat(b')') {
                            return Err(self.syntax("')'"));
                        }
                        Ok(())
                    }
                    _ => Err(self.syntax("'|' or '('")),
                }
            }
            _ => Err(self.syntax("a coefficient, '|' or '('")),
        }
    }

    fn ket(&mut self) -> Result<(String, usize), ParseError> {
        let at = self.pos;
        if !self.eat(b'|') {
            return Err(self.syntax("'|'"));
        }
        let start = self.pos;
        while matches!(self.peek(), Some(b'0') | Some(b'1')) {
            self.pos += 1;
        }
        let len = self.pos - start;
        if len == 0 {
            return Err(self.syntax("'0' or '1'"));
        }
        if !self.eat(b'>') {
            return Err(self.syntax("'0', '1' or '>'"));
        }
        if len > crate::state::MAX_QUBITS {
            return Err(ParseError::Syntax {
                position: at,
                expected: format!("a ket of at most {} bits", crate::state::MAX_QUBITS),
            });
        }
        let bits = std::str::from_utf8(&self.src[start..start + len])
            .expect("bitstring is ASCII")
            .to_string();
        Ok((bits, at))
    }

    fn coefficient(&mut self) -> Result<Complex64, ParseError> {
        self.skip_ws();
        let mut sign = 1.0;
        if self.eat(b'-') {
            sign = -1.0;
        } else {
            let _ = self.eat(b'+');
        }
        self.skip_ws();

        if self.eat(b'i') {
            return Ok(Complex64::new(0.0, sign));
        }

        let magnitude = self.magnitude()?;
        self.skip_ws();
        let value = if self.eat(b'i') {
            Complex64::new(0.0, sign * magnitude)
        } else {
            Complex64::new(sign * magnitude, 0.0)
        };
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(self.syntax("a finite coefficient"));
        }
        Ok(value)
    }

    fn magnitude(&mut self) -> Result<f64, ParseError> {
        if self.peek() == Some(b's') {
            // sqrt(a) or sqrt(a)/b
            let radicand = self.sqrt_argument()?;
            self.skip_ws();
            if self.eat(b'/') {
                self.skip_ws();
                let denom = self.number()?;
                return Ok(radicand.sqrt() / denom);
            }
            return Ok(radicand.sqrt());
        }

        let numerator = self.number()?;
        self.skip_ws();
        if self.eat(b'/') {
            self.skip_ws();
            if self.peek() == Some(b's') {
                let radicand = self.sqrt_argument()?;
                return Ok(numerator / radicand.sqrt());
            }
            let denom = self.number()?;
            return Ok(numerator / denom);
        }
        Ok(numerator)
    }

    fn sqrt_argument(&mut self) -> Result<f64, ParseError> {
        for expected in *b"sqrt" {
            if !self.eat(expected) {
                return Err(self.syntax("'sqrt'"));
            }
        }
        self.skip_ws();
        if !self.eat(b'(') {
            return Err(self.syntax("'(' after 'sqrt'"));
        }
        self.skip_ws();
        let value = self.number()?;
        self.skip_ws();
        if !self.eat(b')') {
            return Err(self.syntax("')'"));
        }
        Ok(value)
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax("a number"));
        }
        if self.eat(b'.') {
            let frac_start = self.pos;
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == frac_start {
                return Err(self.syntax("a digit after '.'"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("digits are ASCII");
        text.parse::<f64>()
            .map_err(|_| self.syntax("a representable number"))
    }
}

/// Render a state as a parseable expression with `precision` digits after
/// the decimal point per coefficient component.
///
/// Terms appear in ascending basis order, the real part of an amplitude
/// before its imaginary part, coefficients that round to zero are omitted,
/// and unit coefficients are elided. `parse(format(s, p))` reproduces `s`
/// at the printed precision: rounding plus the re-normalization on parse
/// stay within a small multiple of `10^-p` per amplitude.
pub fn format_ket_expression(state: &PureState, precision: usize) -> String {
    let precision = precision.max(1);
    let threshold = 0.5 * 10f64.powi(-(precision as i32));
    let width = state.num_qubits();

    let mut rendered = String::new();
    let mut first = true;
    for (index, amp) in state.amplitudes().iter().enumerate() {
        for (value, imaginary) in [(amp.re, false), (amp.im, true)] {
            if value.abs() < threshold {
                continue;
            }
            if first {
                if value < 0.0 {
                    rendered.push_str("- ");
                }
                first = false;
            } else {
                rendered.push_str(if value < 0.0 { " - " } else { " + " });
            }
            let mut magnitude = format!("{:.*}", precision, value.abs());
            if magnitude.contains('.') {
                while magnitude.ends_with('0') {
                    magnitude.pop();
                }
                if magnitude.ends_with('.') {
                    magnitude.pop();
                }
            }
            if magnitude != "1" {
                rendered.push_str(&magnitude);
            }
            if imaginary {
                rendered.push('i');
            }
            rendered.push('|');
            for bit in (0..width).rev() {
                rendered.push(if index & (1 << bit) != 0 { '1' } else { '0' });
            }
            rendered.push('>');
        }
    }
    rendered
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{phase_aligned_max_error, random_state};
    use proptest::prelude::*;

    #[test]
    fn parses_ghz_expression() {
        let state = parse_ket_expression("1/sqrt(2)(|0000> + |1111>)").unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (idx, amp) in state.amplitudes().iter().enumerate() {
            let expected = if idx == 0 || idx == 15 { s } else { 0.0 };
            assert!((amp.re - expected).abs() < 1e-12, "index {idx}");
            assert_eq!(amp.im, 0.0);
        }
    }

    #[test]
    fn parses_single_basis_ket() {
        let state = parse_ket_expression("|00>").unwrap();
        assert_eq!(state.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert_eq!(state.dim(), 4);
    }

    #[test]
    fn parses_shared_prefix_over_sum() {
        let state = parse_ket_expression("1/2(|0001>+|0011>+|0101>+|0111>)").unwrap();
        for (idx, amp) in state.amplitudes().iter().enumerate() {
            let expected = if matches!(idx, 1 | 3 | 5 | 7) {
                0.5
            } else {
                0.0
            };
            assert_eq!(amp.re, expected, "coefficient arithmetic must be exact");
        }
    }

    #[test]
    fn sixteen_term_sign_pattern_is_exact() {
        let text = "1/4(|0000>+|0001>+|0010>+|0011>+|0100>-|0101>+|0110>-|0111>\
                    +|1000>+|1001>-|1010>-|1011>+|1100>-|1101>-|1110>+|1111>)";
        let state = parse_ket_expression(text).unwrap();
        for amp in state.amplitudes() {
            assert_eq!(amp.re.abs(), 0.25);
            assert_eq!(amp.im, 0.0);
        }
    }

    #[test]
    fn parses_imaginary_and_signed_coefficients() {
        let state = parse_ket_expression("1/sqrt(2)|00> - 1/sqrt(2)i|11>").unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((state.amplitudes()[0].re - s).abs() < 1e-15);
        assert!((state.amplitudes()[3].im + s).abs() < 1e-15);

        let state = parse_ket_expression("i|1>").unwrap();
        assert_eq!(state.amplitudes()[1], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn merges_repeated_kets() {
        let expr = KetExpression::parse("0.5|0> + 0.5|0> - 0.5|1> + 1/sqrt(2)|0>").unwrap();
        assert_eq!(expr.terms().len(), 2);
        let merged = expr.terms().iter().find(|(_, bits)| bits == "0").unwrap().0;
        assert!((merged.re - (1.0 + std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-15);

        // Cancellation through merging is also possible.
        let expr = KetExpression::parse("1/sqrt(2)(|0> + |1>) - 1/sqrt(2)|1>").unwrap();
        let state = expr.to_state_normalized().unwrap();
        assert!((state.amplitudes()[0].re - 1.0).abs() < 1e-12);
        assert!(state.amplitudes()[1].norm() < 1e-12);
    }

    #[test]
    fn rejects_mixed_arity() {
        let err = KetExpression::parse("|00> + |000>").unwrap_err();
        assert_eq!(
            err,
            ParseError::MixedArity {
                position: 7,
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn rejects_unnormalized_without_option() {
        let err = parse_ket_expression("|00> + |11>").unwrap_err();
        assert!(
            matches!(err, ParseError::NotNormalized { norm_sqr } if (norm_sqr - 2.0).abs() < 1e-12)
        );

        let state = parse_ket_expression_normalized("|00> + |11>").unwrap();
        assert!((state.amplitudes()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn zero_expression_is_a_typed_error() {
        assert_eq!(
            parse_ket_expression_normalized("0|0>").unwrap_err(),
            ParseError::ZeroVector
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = KetExpression::parse("|0x>").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                position: 2,
                expected: "'0', '1' or '>'".to_string()
            }
        );

        let err = KetExpression::parse("1/2").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { position: 3, .. }));

        let err = KetExpression::parse("(|0>").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { expected, .. } if expected == "')'"));

        let err = KetExpression::parse("|000000000>").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { position: 0, .. }));
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_ket_expression("1/sqrt(2)(|00>+|11>)").unwrap();
        let b = parse_ket_expression(" 1 / sqrt ( 2 ) ( |00> + |11> ) ").unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn formats_ghz_at_precision_ten() {
        let state = parse_ket_expression("1/sqrt(2)(|0000> + |1111>)").unwrap();
        assert_eq!(
            format_ket_expression(&state, 10),
            "0.7071067812|0000> + 0.7071067812|1111>"
        );
    }

    #[test]
    fn format_elides_unit_coefficients() {
        let state = parse_ket_expression("|01>").unwrap();
        assert_eq!(format_ket_expression(&state, 10), "|01>");
    }

    #[test]
    fn format_renders_negative_terms() {
        let state = parse_ket_expression("1/2(|0000> + |0011> + |1100> - |1111>)").unwrap();
        assert_eq!(
            format_ket_expression(&state, 10),
            "0.5|0000> + 0.5|0011> + 0.5|1100> - 0.5|1111>"
        );

        let negative_first = parse_ket_expression("-|01>").unwrap();
        assert_eq!(format_ket_expression(&negative_first, 6), "- |01>");
    }

    #[test]
    fn format_renders_imaginary_parts_separately() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let state = PureState::new(
            vec![
                Complex64::new(s, 0.0),
                Complex64::new(0.0, -s),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
            2,
        )
        .unwrap();
        assert_eq!(
            format_ket_expression(&state, 6),
            "0.707107|00> - 0.707107i|01>"
        );
    }

    #[test]
    fn imaginary_prefix_distributes_over_sums() {
        let state = parse_ket_expression("1/sqrt(2)i(|00> + |11>)").unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((state.amplitudes()[0].im - s).abs() < 1e-15);
        assert!((state.amplitudes()[3].im - s).abs() < 1e-15);
        assert_eq!(state.amplitudes()[0].re, 0.0);
    }

    #[test]
    fn bare_sqrt_magnitude_and_sqrt_over_denominator() {
        let a = parse_ket_expression("sqrt(2)/2(|0> + |1>)").unwrap();
        let b = parse_ket_expression("1/sqrt(2)(|0> + |1>)").unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-15);
        }
        let c2 = parse_ket_expression_normalized("sqrt(3)|0> + sqrt(1)|1>").unwrap();
        assert!((c2.amplitudes()[0].re - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn nesting_is_bounded_by_a_typed_error() {
        let deep_ok = format!("{}{}{}", "(".repeat(30), "|0>", ")".repeat(30));
        assert!(parse_ket_expression(&deep_ok).is_ok());
        let too_deep = format!("{}{}{}", "(".repeat(40), "|0>", ")".repeat(40));
        assert!(matches!(
            parse_ket_expression(&too_deep),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn division_by_zero_is_a_typed_error() {
        assert!(matches!(
            parse_ket_expression("1/0|0>"),
            Err(ParseError::Syntax { expected, .. }) if expected.contains("finite")
        ));
    }

    #[test]
    fn round_trip_over_seeded_random_states() {
        for seed in 0..1000 {
            let qubits = 1 + (seed as usize % 4);
            let state = random_state(qubits, seed).unwrap();
            let text = format_ket_expression(&state, 12);
            let back =
                parse_ket_expression(&text).unwrap_or_else(|e| panic!("seed {seed}: {text}: {e}"));
            assert!(
                phase_aligned_max_error(&back, &state) < 1e-10,
                "seed {seed}"
            );
        }
    }

    proptest! {
        // Totality: arbitrary input never panics, it parses or reports a
        // typed error.
        #[test]
        fn parser_is_total_on_arbitrary_strings(text in "\\PC*") {
            let _ = parse_ket_expression(&text);
        }

        #[test]
        fn parser_is_total_on_grammar_like_strings(
            text in "[-+ ()|01i/2-9sqrt.]{0,64}"
        ) {
            let _ = parse_ket_expression(&text);
        }

        // Any expression the grammar generator produces either evaluates or
        // fails with a typed error, and evaluation round-trips through the
        // formatter.
        #[test]
        fn generated_expressions_parse(
            coeffs in proptest::collection::vec(0.1f64..1.0, 1..5),
            bits in proptest::collection::vec(0usize..4, 1..5),
        ) {
            let terms: Vec<String> = coeffs
                .iter()
                .zip(bits.iter())
                .map(|(c, b)| format!("{c:.6}|{:02b}>", b))
                .collect();
            let text = terms.join(" + ");
            match parse_ket_expression_normalized(&text) {
                Ok(state) => {
                    let again =
                        parse_ket_expression_normalized(&format_ket_expression(&state, 12))
                            .unwrap();
                    prop_assert!(phase_aligned_max_error(&again, &state) < 1e-10);
                }
                Err(ParseError::ZeroVector) => {}
                Err(other) => return Err(TestCaseError::fail(format!("{other}"))),
            }
        }
    }
}
