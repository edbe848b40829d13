use super::{Dataset, DifficultyLevel, ItemCoding, Predictor, VarKind};
use crate::error::{Error, Result};

/// Required header, in column order. An optional trailing `course` column may follow.
pub const CSV_HEADER: &str = "item_id,T1,T2,T3,C1,C2,C3,C4,C5,S1,S2,S3,S4,S5,S6,S7,D";

const COURSE_COLUMN: &str = "course";

/// Parses a coded-item CSV file. Rows are numbered from 1 (the first data row).
pub fn parse_dataset(csv_text: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(csv_text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        Some(rec) => rec.map_err(|e| Error::Data(format!("malformed header: {e}")))?,
        None => return Err(Error::Data("malformed header: input is empty".into())),
    };
    let expected: Vec<&str> = CSV_HEADER.split(',').collect();
    let fields: Vec<&str> = header.iter().collect();
    let has_course = match fields.len() {
        n if n == expected.len() => false,
        n if n == expected.len() + 1 && fields[n - 1] == COURSE_COLUMN => true,
        _ => {
            return Err(Error::Data(format!(
                "malformed header: expected `{CSV_HEADER}[,course]`, found `{}`",
                fields.join(",")
            )))
        }
    };
    if fields[..expected.len()] != expected[..] {
        return Err(Error::Data(format!(
            "malformed header: expected `{CSV_HEADER}[,course]`, found `{}`",
            fields.join(",")
        )));
    }
    let width = fields.len();

    let mut items = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, rec) in records.enumerate() {
        let row = idx + 1;
        let rec = rec.map_err(|e| Error::Field {
            row,
            column: "-".into(),
            message: format!("malformed record: {e}"),
        })?;
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        if rec.len() != width {
            return Err(Error::Field {
                row,
                column: "-".into(),
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        let field_err = |column: &str, message: String| Error::Field {
            row,
            column: column.to_string(),
            message,
        };

        let item_id = rec[0].to_string();
        if item_id.is_empty() {
            return Err(field_err("item_id", "missing item_id".into()));
        }
        let mut codes = [0i64; 15];
        for var in Predictor::ALL {
            let raw = &rec[var.index() + 1];
            if raw.is_empty() {
                return Err(field_err(var.name(), "missing value".into()));
            }
            let value: i64 = raw
                .parse()
                .map_err(|_| field_err(var.name(), format!("non-integer value `{raw}`")))?;
            match var.kind() {
                VarKind::Count if value < 0 => {
                    return Err(field_err(
                        var.name(),
                        format!("count must be a nonnegative integer, found {value}"),
                    ))
                }
                VarKind::Ordinal { max } if !(1..=max).contains(&value) => {
                    return Err(field_err(
                        var.name(),
                        format!("ordinal code out of domain 1..{max}, found {value}"),
                    ))
                }
                _ => {}
            }
            codes[var.index()] = value;
        }
        let d_raw = &rec[16];
        let difficulty = if d_raw.is_empty() {
            None
        } else {
            Some(
                d_raw
                    .parse::<DifficultyLevel>()
                    .map_err(|_| field_err("D", format!("unknown difficulty level `{d_raw}`")))?,
            )
        };
        let course = if has_course && !rec[17].is_empty() {
            Some(rec[17].to_string())
        } else {
            None
        };
        if !seen.insert(item_id.clone()) {
            return Err(field_err("item_id", format!("duplicate item_id `{item_id}`")));
        }
        items.push(ItemCoding {
            item_id,
            codes,
            difficulty,
            course,
        });
    }
    Dataset::new(items)
}

/// Writes the dataset in the canonical CSV layout. The `course` column is
/// emitted only when at least one item carries a course tag.
pub fn serialize_dataset(data: &Dataset) -> String {
    let with_course = data.items().iter().any(|i| i.course.is_some());
    let mut out = String::with_capacity(64 * (data.len() + 1));
    out.push_str(CSV_HEADER);
    if with_course {
        out.push(',');
        out.push_str(COURSE_COLUMN);
    }
    out.push('\n');
    for item in data.items() {
        out.push_str(&item.item_id);
        for code in item.codes() {
            out.push(',');
            out.push_str(&code.to_string());
        }
        out.push(',');
        if let Some(d) = item.difficulty {
            out.push_str(d.name());
        }
        if with_course {
            out.push(',');
            if let Some(c) = &item.course {
                out.push_str(c);
            }
        }
        out.push('\n');
    }
    out
}
