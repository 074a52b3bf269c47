use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{QuboInstance, Sense};

/// Wire form: `{n_vars, sense, offset, linear: [[i, c]..], quadratic: [[i, j, c]..]}`.
#[derive(Debug, Serialize, Deserialize)]
struct QuboDocument {
    n_vars: usize,
    sense: Sense,
    offset: f64,
    linear: Vec<(usize, f64)>,
    quadratic: Vec<(usize, usize, f64)>,
}

impl QuboInstance<f64> {
    pub fn to_json(&self) -> String {
        let doc = QuboDocument {
            n_vars: self.n_vars,
            sense: self.sense,
            offset: self.offset,
            linear: self.linear_terms().map(|(i, c)| (i, *c)).collect(),
            quadratic: self.quadratic_terms().map(|(i, j, c)| (i, j, *c)).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("QUBO document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: QuboDocument =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("QUBO JSON: {e}")))?;
        QuboInstance::new(doc.n_vars, doc.sense, doc.offset, doc.linear, doc.quadratic)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn document_shape() {
        let q = QuboInstance::new(3, Sense::Maximize, 1.5, [(0, 2.0)], [(1, 2, -0.25)]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&q.to_json()).unwrap();
        assert_eq!(v["n_vars"], 3);
        assert_eq!(v["sense"], "maximize");
        assert_eq!(v["linear"], serde_json::json!([[0, 2.0]]));
        assert_eq!(v["quadratic"], serde_json::json!([[1, 2, -0.25]]));
    }

    #[test]
    fn rejects_diagonal_in_document() {
        let text = r#"{"n_vars":2,"sense":"minimize","offset":0,"linear":[],"quadratic":[[1,1,2.0]]}"#;
        assert!(QuboInstance::from_json(text).is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip(
            n in 1usize..8,
            offset in -1e3f64..1e3,
            lin in proptest::collection::vec((0usize..8, -1e3f64..1e3), 0..8),
            quad in proptest::collection::vec((0usize..8, 0usize..8, -1e3f64..1e3), 0..12),
        ) {
            let lin: Vec<_> = lin.into_iter().filter(|(i, _)| *i < n).collect();
            let quad: Vec<_> = quad.into_iter().filter(|(i, j, _)| *i < n && *j < n && i != j).collect();
            let q = QuboInstance::new(n, Sense::Minimize, offset, lin, quad).unwrap();
            let back = QuboInstance::from_json(&q.to_json()).unwrap();
            prop_assert_eq!(back, q);
        }
    }
}
