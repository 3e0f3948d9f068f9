use crate::HarnessError;

const LABELS: [&str; 3] = ["Lead", "Paragraph", "Output"];

/// `Lead:`, `Paragraph :`, `Output:` at the very start.
fn strip_label(text: &str) -> Option<&str> {
    LABELS.iter().find_map(|label| {
        let rest = text.strip_prefix(label)?;
        rest.trim_start_matches([' ', '\t']).strip_prefix(':')
    })
}

/// Reduce a raw completion to the lead paragraph.
///
/// Trims, drops any leading `Lead:`/`Paragraph:`/`Output:` labels, then keeps
/// only the first blank-line separated paragraph. Idempotent.
pub fn clean_output(raw: &str) -> Result<String, HarnessError> {
    let mut text = raw.trim();
    while let Some(rest) = strip_label(text) {
        text = rest.trim();
    }
    let paragraph = first_paragraph(text).trim();
    if paragraph.is_empty() {
        return Err(HarnessError::EmptyAfterCleaning);
    }
    Ok(paragraph.to_string())
}

fn first_paragraph(text: &str) -> &str {
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if line.trim().is_empty() && offset > 0 {
            return &text[..offset];
        }
        offset += line.len();
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_label_and_tail() {
        assert_eq!(
            clean_output("Lead: The city of Boston announced…\n\nMore text.").unwrap(),
            "The city of Boston announced…"
        );
    }

    #[test]
    fn clean_paragraph_unchanged() {
        let text = "The city of Boston announced a plan. It starts today.";
        assert_eq!(clean_output(text).unwrap(), text);
    }

    #[test]
    fn label_only() {
        assert_eq!(clean_output("Output:"), Err(HarnessError::EmptyAfterCleaning));
        assert_eq!(clean_output("   \n "), Err(HarnessError::EmptyAfterCleaning));
    }

    #[test]
    fn label_on_its_own_line() {
        assert_eq!(
            clean_output("Paragraph :\n\nA storm hit.\nIt rained.\n \nNotes").unwrap(),
            "A storm hit.\nIt rained."
        );
    }

    #[test]
    fn stacked_labels_are_idempotent() {
        let once = clean_output("Lead: Output: Text here.").unwrap();
        assert_eq!(once, "Text here.");
        assert_eq!(clean_output(&once).unwrap(), once);
    }

    #[test]
    fn label_must_lead() {
        let text = "The Lead: not a label.";
        assert_eq!(clean_output(text).unwrap(), text);
    }
}
