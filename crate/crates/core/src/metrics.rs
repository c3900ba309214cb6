//! Classification metrics: confusion matrix, per-class precision/recall/F1,
//! macro averages and accuracy.

use serde::{Deserialize, Serialize};

use crate::forest::{ForestError, ForestModel, LabeledSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub class_names: Vec<String>,
    /// `confusion[truth][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub per_class: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl MetricsReport {
    /// Builds the report from parallel truth/prediction label lists.
    ///
    /// Macro averages run over every named class, including classes absent
    /// from both lists.
    pub fn from_labels(class_names: &[String], truth: &[usize], predicted: &[usize]) -> Self {
        assert_eq!(truth.len(), predicted.len(), "label lists differ in length");
        let k = class_names.len();
        let mut confusion = vec![vec![0usize; k]; k];
        for (&t, &p) in truth.iter().zip(predicted) {
            confusion[t][p] += 1;
        }
        let per_class: Vec<ClassMetrics> = (0..k)
            .map(|c| {
                let tp = confusion[c][c];
                let support: usize = confusion[c].iter().sum();
                let predicted_c: usize = confusion.iter().map(|row| row[c]).sum();
                let precision = ratio(tp, predicted_c);
                let recall = ratio(tp, support);
                let f1 = if precision + recall > 0.0 {
                    2.0 * precision * recall / (precision + recall)
                } else {
                    0.0
                };
                ClassMetrics {
                    class: class_names[c].clone(),
                    precision,
                    recall,
                    f1,
                    support,
                }
            })
            .collect();
        let mean = |f: fn(&ClassMetrics) -> f64| {
            if k == 0 {
                0.0
            } else {
                per_class.iter().map(f).sum::<f64>() / k as f64
            }
        };
        let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
        Self {
            class_names: class_names.to_vec(),
            macro_precision: mean(|m| m.precision),
            macro_recall: mean(|m| m.recall),
            macro_f1: mean(|m| m.f1),
            accuracy: ratio(correct, truth.len()),
            confusion,
            per_class,
        }
    }

    /// `class,precision,recall,f1` rows, then `average` and `accuracy`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,precision,recall,f1\n");
        for m in &self.per_class {
            out.push_str(&format!(
                "{},{:.4},{:.4},{:.4}\n",
                m.class, m.precision, m.recall, m.f1
            ));
        }
        out.push_str(&format!(
            "average,{:.4},{:.4},{:.4}\n",
            self.macro_precision, self.macro_recall, self.macro_f1
        ));
        out.push_str(&format!("accuracy,,,{:.4}\n", self.accuracy));
        out
    }

    /// Rows are true classes, columns predicted classes.
    pub fn confusion_csv(&self) -> String {
        let mut out = String::from("truth");
        for n in &self.class_names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (name, row) in self.class_names.iter().zip(&self.confusion) {
            out.push_str(name);
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Predicts every row of `set` and scores the result.
pub fn evaluate(model: &ForestModel, set: &LabeledSet) -> Result<MetricsReport, ForestError> {
    let mut truth = Vec::with_capacity(set.len());
    let mut predicted = Vec::with_capacity(set.len());
    for r in &set.rows {
        truth.push(r.label);
        predicted.push(model.predict(&r.features)?.label);
    }
    Ok(MetricsReport::from_labels(&model.class_names, &truth, &predicted))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    #[test]
    fn perfect_predictions() {
        let t = [0, 1, 2, 1, 0];
        let r = MetricsReport::from_labels(&names(3), &t, &t);
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.macro_f1, 1.0);
        for (i, row) in r.confusion.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert!(i == j || v == 0);
            }
        }
    }

    #[test]
    fn two_class_arithmetic() {
        // class 1: TP=3, FP=1, FN=1
        let truth = [1, 1, 1, 1, 0, 0];
        let pred = [1, 1, 1, 0, 1, 0];
        let r = MetricsReport::from_labels(&names(2), &truth, &pred);
        let m = &r.per_class[1];
        assert!((m.precision - 0.75).abs() < 1e-12);
        assert!((m.recall - 0.75).abs() < 1e-12);
        assert!((m.f1 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn undefined_metrics_are_zero() {
        let r = MetricsReport::from_labels(&names(3), &[0, 0], &[0, 1]);
        assert_eq!(r.per_class[2].precision, 0.0);
        assert_eq!(r.per_class[2].f1, 0.0);
        assert_eq!(r.per_class[1].precision, 0.0);
    }

    #[test]
    fn csv_layout() {
        let r = MetricsReport::from_labels(&names(2), &[0, 1], &[0, 1]);
        let csv = r.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "class,precision,recall,f1");
        assert_eq!(lines[3], "average,1.0000,1.0000,1.0000");
        assert_eq!(lines[4], "accuracy,,,1.0000");
        assert!(r.confusion_csv().starts_with("truth,c0,c1\nc0,1,0\n"));
    }
}
