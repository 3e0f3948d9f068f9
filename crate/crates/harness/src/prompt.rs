use serde::{Deserialize, Serialize};

use crate::HarnessError;

pub const SYSTEM_PROMPT: &str =
    "You are a professional journalist specializing in writing news. Follow the given structure.";

/// `{headline}` and `{lead_three_words}` are the only placeholders.
pub const USER_PROMPT_TEMPLATE: &str = "You will write a news lead paragraph using the inputs below.
  Inputs
  Headline: {headline}
  LeadThreeWords: {lead_three_words}
  Requirements - Mandatory
  Write one paragraph of several sentences (more than one, e.g. two-three (2-3)); no title, no bullets.
  Output format: the paragraph only, no preamble or labels.";

/// A headline plus the opening three words of the human-written lead.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationTask {
    pub headline: String,
    pub lead_three_words: String,
    pub source_id: String,
}

impl GenerationTask {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.headline.trim().is_empty() {
            return Err(HarnessError::BadTask {
                source_id: self.source_id.clone(),
                reason: "empty headline".into(),
            });
        }
        let words = self.lead_three_words.split_whitespace().count();
        if words != 3 {
            return Err(HarnessError::BadTask {
                source_id: self.source_id.clone(),
                reason: format!("lead_three_words has {words} tokens, expected 3"),
            });
        }
        Ok(())
    }
}

/// System and user prompt for one task.
pub fn render_prompts(task: &GenerationTask) -> Result<(String, String), HarnessError> {
    task.validate()?;
    Ok((SYSTEM_PROMPT.to_string(), fill_template(USER_PROMPT_TEMPLATE, task)))
}

// Single pass, so placeholder-like text inside a headline is left alone.
fn fill_template(template: &str, task: &GenerationTask) -> String {
    let mut out = String::with_capacity(template.len() + task.headline.len());
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let tail = &rest[start..];
        if let Some(after) = tail.strip_prefix("{headline}") {
            out.push_str(&task.headline);
            rest = after;
        } else if let Some(after) = tail.strip_prefix("{lead_three_words}") {
            out.push_str(&task.lead_three_words);
            rest = after;
        } else {
            out.push('{');
            rest = &tail[1..];
        }
    }
    out.push_str(rest);
    out
}
