//! Prompt texts sent to the LLM backend and parsers for its replies.

use serde::{Deserialize, Serialize};

use crate::error::ProviderError;

/// The boolean classification question. The page text follows it after a
/// blank line.
pub const TECH_QUESTION: &str = "Does this text contain technology-related terms?";

/// First line of every definition request.
pub const DEFINE_HEADER: &str =
    "Which of the candidate terms below are technical acronyms in the given text? Define each one.";

const DEFINE_INSTRUCTIONS: &str = "Reply with only a JSON array of objects with string fields \
\"key\", \"expansion\" and \"definition\". Omit candidates that are not technical acronyms.";

const CANDIDATES_LABEL: &str = "Candidates: ";

pub fn tech_prompt(text: &str) -> String {
    format!("{TECH_QUESTION}\n\n{text}")
}

/// Page text carried by a prompt built with [`tech_prompt`].
pub fn tech_prompt_text(prompt: &str) -> Option<&str> {
    prompt
        .strip_prefix(TECH_QUESTION)
        .map(|rest| rest.strip_prefix("\n\n").unwrap_or(rest))
}

/// Read a yes/no answer from the leading token of `reply`.
pub fn parse_boolean(reply: &str) -> Result<bool, ProviderError> {
    let token: String = reply
        .trim_start()
        .chars()
        .take_while(|c| c.is_alphanumeric())
        .collect::<String>()
        .to_lowercase();
    match token.as_str() {
        "yes" | "true" => Ok(true),
        "no" | "false" => Ok(false),
        _ => Err(ProviderError::BadResponse(reply.chars().take(80).collect())),
    }
}

pub fn define_prompt(candidates: &[String], context: &str) -> String {
    format!(
        "{DEFINE_HEADER}\n{DEFINE_INSTRUCTIONS}\n\n{CANDIDATES_LABEL}{}\n\nText:\n{context}",
        candidates.join(", ")
    )
}

/// Candidate keys listed in a prompt built with [`define_prompt`].
pub fn define_prompt_candidates(prompt: &str) -> Option<Vec<String>> {
    if !prompt.starts_with(DEFINE_HEADER) {
        return None;
    }
    let line = prompt
        .lines()
        .find_map(|l| l.strip_prefix(CANDIDATES_LABEL))?;
    Some(
        line.split(", ")
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmDefinition {
    pub key: String,
    pub expansion: String,
    pub definition: String,
}

/// Parse the JSON array of definitions, tolerating prose or code fences
/// around it.
pub fn parse_definitions(reply: &str) -> Result<Vec<LlmDefinition>, ProviderError> {
    let bad = || ProviderError::BadResponse(reply.chars().take(80).collect());
    let start = reply.find('[').ok_or_else(bad)?;
    let end = reply.rfind(']').ok_or_else(bad)?;
    if end < start {
        return Err(bad());
    }
    let defs: Vec<LlmDefinition> = serde_json::from_str(&reply[start..=end]).map_err(|_| bad())?;
    Ok(defs
        .into_iter()
        .filter(|d| {
            !d.key.trim().is_empty()
                && !d.expansion.trim().is_empty()
                && !d.definition.trim().is_empty()
        })
        .collect())
}
