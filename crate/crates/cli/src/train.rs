//! Training-demo input parsing and model dump.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};
use tricorner::nnet::TrainedModel;
use tricorner::{format_vector, DenseMatrix};

/// Features and targets read from CSV. The first `inputs` columns are
/// features, the rest targets. A first row that does not parse as numbers
/// is taken as a header.
pub fn read_training_csv(
    path: &Path,
    inputs: Option<usize>,
) -> anyhow::Result<(DenseMatrix, DenseMatrix)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_training_csv(&text, inputs)
}

pub fn parse_training_csv(
    text: &str,
    inputs: Option<usize>,
) -> anyhow::Result<(DenseMatrix, DenseMatrix)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if line == 0 => continue,
            Err(e) => bail!("line {}: {e}", line + 1),
        }
    }
    if rows.is_empty() {
        bail!("training CSV has no data rows");
    }
    let width = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        bail!(
            "data row {} has {} columns, expected {width}",
            i + 1,
            rows[i].len()
        );
    }
    let inputs = inputs.unwrap_or(width.saturating_sub(1));
    if inputs == 0 || inputs >= width {
        bail!(
            "need at least one feature and one target column; {width} columns with {inputs} inputs"
        );
    }
    let x = DenseMatrix::from_fn(rows.len(), inputs, |j, k| rows[j][k]);
    let t = DenseMatrix::from_fn(rows.len(), width - inputs, |j, k| rows[j][inputs + k]);
    Ok((x, t))
}

/// Pruned system in the matrix text format followed by flat weight listings.
pub fn dump_model(model: &TrainedModel) -> String {
    let mut s = String::new();
    if let Some(g) = &model.g_structured {
        s.push_str("# pruned hidden matrix\n");
        s.push_str(&g.to_text());
    }
    let _ = writeln!(s, "# solver: {}", model.solver.label());
    let _ = writeln!(
        s,
        "# w_in ({} x {})",
        model.layer.w_in.rows(),
        model.layer.w_in.cols()
    );
    let _ = writeln!(s, "{}", format_vector(model.layer.w_in.as_slice()));
    let _ = writeln!(s, "# bias\n{}", format_vector(&model.layer.bias));
    let _ = writeln!(s, "# diagonal shift\n{}", format_vector(&model.diag_shift));
    let _ = writeln!(
        s,
        "# w_out ({} x {})",
        model.w_out.rows(),
        model.w_out.cols()
    );
    let _ = writeln!(s, "{}", format_vector(model.w_out.as_slice()));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_optional() {
        let (x, t) = parse_training_csv("x,y\n1,2\n3,4\n", None).unwrap();
        assert_eq!(x, DenseMatrix::from_rows(&[[1.0], [3.0]]));
        assert_eq!(t, DenseMatrix::from_rows(&[[2.0], [4.0]]));
        let (x2, _) = parse_training_csv("1,2\n3,4\n", None).unwrap();
        assert_eq!(x, x2);
    }

    #[test]
    fn inputs_split() {
        let (x, t) = parse_training_csv("1,2,3\n4,5,6\n", Some(1)).unwrap();
        assert_eq!((x.cols(), t.cols()), (1, 2));
        assert!(parse_training_csv("1,2\n", Some(2)).is_err());
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(parse_training_csv("", None).is_err());
        assert!(parse_training_csv("a,b\n", None).is_err());
        assert!(parse_training_csv("1,2\n1,2,3\n", None).is_err());
        assert!(parse_training_csv("1,2\nx,3\n", None).is_err());
    }
}
