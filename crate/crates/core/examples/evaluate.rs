//! Precision, recall and macro F1 from a confusion matrix, plus validation
//! of a prediction file against gold ids.
//!
//! cargo run --example evaluate

use std::collections::BTreeSet;

use codemix::corpus::validate_predictions;
use codemix::metrics::{class_prf, confusion_matrix, evaluate, macro_f1};
use codemix::sentiment::Sentiment::{self, Negative, Neutral, Positive};

fn main() -> codemix::error::Result<()> {
    let gold = [Positive, Positive, Neutral, Neutral, Neutral, Negative, Negative];
    let pred = [Positive, Neutral, Neutral, Neutral, Negative, Negative, Positive];

    let cm = confusion_matrix(&gold, &pred)?;
    for c in Sentiment::ALL {
        let (p, r, f) = class_prf(&cm, c);
        println!("{c:<9} p={p:.3} r={r:.3} f1={f:.3}");
    }
    println!("macro F1 {:.4}\n", macro_f1(&cm));
    print!("{}", evaluate(&gold, &pred)?);

    let ids: BTreeSet<i64> = [1, 2, 3].into();
    let raw = br#"[{"id": 1, "sentiment": 1}, {"id": 4, "sentiment": 0}]"#;
    let report = validate_predictions(&ids, raw)?;
    println!("\nvalid: {}  {report:?}", report.is_valid());
    Ok(())
}
