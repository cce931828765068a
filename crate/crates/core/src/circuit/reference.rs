//! Closed-form success probabilities quoted for the heralded schemes.
//!
//! These contain square roots, so they are carried as reference figures next
//! to the computed weights rather than asserted against them.

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceProbability {
    pub expression: String,
    pub value: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `N! sqrt(N!) / (N^N)^N`.
pub fn general_closed_form(n: usize) -> ReferenceProbability {
    let f = factorial(n);
    let nn = n as f64;
    ReferenceProbability {
        expression: "N!*sqrt(N!)/(N^N)^N".into(),
        value: f * f.sqrt() / nn.powf(nn * nn),
    }
}

/// Reference figures applicable at `n`: the general form, plus the quoted
/// tritter value `2 sqrt(6) / 3^8` at `N = 3`.
pub fn closed_form_references(n: usize) -> Vec<ReferenceProbability> {
    let mut refs = Vec::new();
    if n == 3 {
        refs.push(ReferenceProbability {
            expression: "2*sqrt(6)/3^8".into(),
            value: 2.0 * 6f64.sqrt() / 3f64.powi(8),
        });
    }
    refs.push(general_closed_form(n));
    refs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n3_forms_coincide() {
        let refs = closed_form_references(3);
        assert_eq!(refs.len(), 2);
        assert!((refs[0].value - 7.466_818_298_378_839e-4).abs() < 1e-15);
        assert!((refs[0].value - refs[1].value).abs() < 1e-15);
    }

    #[test]
    fn n2_general_form() {
        let r = general_closed_form(2);
        assert!((r.value - 2.0 * 2f64.sqrt() / 16.0).abs() < 1e-15);
    }
}
