use serde::{Deserialize, Serialize};

use super::{SentimentLabel, TaskInstance};
use crate::error::{Error, Result};

pub const FEW_SHOT_PLACEHOLDER: &str = "{{few_shot}}";
pub const CONTEXT_PLACEHOLDER: &str = "{{context}}";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FewShotExample {
    pub context: String,
    pub label: SentimentLabel,
}

/// Instruction text with `{{few_shot}}` and `{{context}}` slots, plus the examples that
/// fill the first slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub instruction: String,
    #[serde(default)]
    pub few_shot: Vec<FewShotExample>,
}

impl PromptTemplate {
    pub fn new(instruction: impl Into<String>) -> Result<Self> {
        let t = PromptTemplate {
            instruction: instruction.into(),
            few_shot: Vec::new(),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let t: PromptTemplate = toml::from_str(text).map_err(|e| Error::Template(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for ph in [FEW_SHOT_PLACEHOLDER, CONTEXT_PLACEHOLDER] {
            let n = self.instruction.matches(ph).count();
            if n != 1 {
                return Err(Error::Template(format!(
                    "placeholder {ph} must appear exactly once, found {n}"
                )));
            }
        }
        Ok(())
    }

    fn few_shot_block(&self) -> String {
        self.few_shot
            .iter()
            .map(|ex| format!("Besedilo: {}\nOznaka: {}\n", ex.context, ex.label.symbol()))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Placeholder Slovene instruction shipped with the tool; replace it with a tuned prompt.
    pub fn placeholder() -> Self {
        Self::from_toml(include_str!("../../templates/placeholder_sl.toml"))
            .expect("bundled template is valid")
    }
}

pub fn render_prompt(instance: &TaskInstance, template: &PromptTemplate) -> Result<String> {
    template.validate()?;
    // substitute the context last so its text is never scanned for placeholders
    let (head, tail) = template
        .instruction
        .split_once(CONTEXT_PLACEHOLDER)
        .expect("validated");
    let few_shot = template.few_shot_block();
    let head = head.replacen(FEW_SHOT_PLACEHOLDER, &few_shot, 1);
    let tail = tail.replacen(FEW_SHOT_PLACEHOLDER, &few_shot, 1);
    Ok(format!("{head}{}{tail}", instance.context))
}
