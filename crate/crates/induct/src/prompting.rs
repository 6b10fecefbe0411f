//! Byte-deterministic prompt rendering.
//!
//! Three prompt families: instruction induction (a template wraps five
//! demonstrations and elicits an instruction), in-context execution (five
//! demonstrations plus a bare test input), and instruction execution (the
//! induced instruction plus one input).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::taskgen::Demonstration;

/// Number of demonstrations an induction or in-context prompt carries.
pub const PROMPT_DEMOS: usize = 5;

/// Separator between demonstration blocks in in-context prompts.
const BLOCK_SEPARATOR: &str = "\n\n";

/// Induction prompt template. Stored as JSON so users can swap wordings
/// without recompiling; `demo_block_format` must contain `{input}` and
/// `{output}` exactly once each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub name: String,
    pub preamble: String,
    pub demo_block_format: String,
    pub separator: String,
    pub suffix: String,
}

/// The default induction template bundled with the crate.
const DEFAULT_TEMPLATE_JSON: &str = include_str!("../data/templates/default.json");

impl PromptTemplate {
    /// The bundled induction template: a friend-framing puzzle preamble,
    /// Input/Output demonstration blocks, and an instruction-eliciting
    /// suffix.
    pub fn default_induction() -> PromptTemplate {
        serde_json::from_str(DEFAULT_TEMPLATE_JSON).expect("bundled template parses")
    }

    pub fn load(path: &std::path::Path) -> Result<PromptTemplate> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let template: PromptTemplate =
            serde_json::from_str(&text).map_err(|e| Error::parse(path, 1, e.to_string()))?;
        template.validate()?;
        Ok(template)
    }

    pub fn validate(&self) -> Result<()> {
        for placeholder in ["{input}", "{output}"] {
            if self.demo_block_format.matches(placeholder).count() != 1 {
                return Err(Error::InvalidArgument(format!(
                    "template '{}': demo_block_format must contain {placeholder} exactly once",
                    self.name
                )));
            }
        }
        Ok(())
    }

    fn render_block(&self, demo: &Demonstration) -> String {
        self.demo_block_format
            .replace("{input}", &demo.input)
            .replace("{output}", demo.primary_gold())
    }
}

/// A rendered prompt plus bookkeeping for run records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub text: String,
    pub template_name: String,
    pub demo_count: usize,
}

/// One demonstration block: `Input: <x>` newline `Output: <y>`, using the
/// demonstration's primary gold output. No trailing whitespace.
pub fn render_demonstration(demo: &Demonstration) -> String {
    format!("Input: {}\nOutput: {}", demo.input, demo.primary_gold())
}

/// The instruction-induction prompt: preamble, five demonstration blocks,
/// instruction-eliciting suffix, all joined by the template separator.
pub fn render_induction_prompt(
    demos: &[Demonstration],
    template: &PromptTemplate,
) -> Result<RenderedPrompt> {
    if demos.len() != PROMPT_DEMOS {
        return Err(Error::InvalidArgument(format!(
            "induction prompt needs exactly {PROMPT_DEMOS} demonstrations, got {}",
            demos.len()
        )));
    }
    template.validate()?;
    let blocks: Vec<String> = demos.iter().map(|d| template.render_block(d)).collect();
    let text = format!(
        "{}{sep}{}{sep}{}",
        template.preamble,
        blocks.join(&template.separator),
        template.suffix,
        sep = template.separator,
    );
    Ok(RenderedPrompt {
        text,
        template_name: template.name.clone(),
        demo_count: demos.len(),
    })
}

/// The in-context execution prompt: five demonstration blocks followed by
/// the bare test input. Ends exactly with "Output:"; the model's
/// continuation is the prediction.
pub fn render_in_context_prompt(
    demos: &[Demonstration],
    test_input: &str,
) -> Result<RenderedPrompt> {
    if demos.len() != PROMPT_DEMOS {
        return Err(Error::InvalidArgument(format!(
            "in-context prompt needs exactly {PROMPT_DEMOS} demonstrations, got {}",
            demos.len()
        )));
    }
    let blocks: Vec<String> = demos.iter().map(render_demonstration).collect();
    let text = format!(
        "{}{BLOCK_SEPARATOR}Input: {test_input}\nOutput:",
        blocks.join(BLOCK_SEPARATOR)
    );
    Ok(RenderedPrompt {
        text,
        template_name: "in_context".to_string(),
        demo_count: demos.len(),
    })
}

/// The instruction execution prompt. The instruction is used verbatim
/// apart from surrounding-whitespace trimming; an empty instruction is an
/// error so a missing induction output cannot silently score as a prompt.
pub fn render_execution_prompt(instruction: &str, input: &str) -> Result<RenderedPrompt> {
    let instruction = instruction.trim();
    if instruction.is_empty() {
        return Err(Error::InvalidArgument("empty instruction".into()));
    }
    Ok(RenderedPrompt {
        text: format!("{instruction}\n\nInput: {input}\nOutput:"),
        template_name: "execution".to_string(),
        demo_count: 0,
    })
}

/// Recover the demonstration list and test input from a rendered
/// in-context prompt (the round-trip counterpart of
/// [`render_in_context_prompt`]). Returns `None` when the text does not
/// follow the Input/Output block structure.
pub fn parse_in_context_prompt(text: &str) -> Option<(Vec<Demonstration>, String)> {
    #[derive(PartialEq)]
    enum Mode {
        Expect,
        Input,
        Output,
    }
    let mut demos: Vec<(String, String)> = Vec::new();
    let mut current: Option<(String, Option<String>)> = None;
    let mut mode = Mode::Expect;
    for line in text.split('\n') {
        if let Some(rest) = line
            .strip_prefix("Input: ")
            .or_else(|| (line == "Input:").then_some(""))
        {
            if let Some((input, output)) = current.take() {
                demos.push((input, output?));
            }
            current = Some((rest.to_string(), None));
            mode = Mode::Input;
        } else if let Some(rest) = line.strip_prefix("Output:") {
            let (_, output) = current.as_mut()?;
            if output.is_some() {
                return None;
            }
            *output = Some(rest.strip_prefix(' ').unwrap_or(rest).to_string());
            mode = Mode::Output;
        } else {
            // Continuation line of a multi-line input or output.
            match mode {
                Mode::Input => {
                    let (input, _) = current.as_mut()?;
                    input.push('\n');
                    input.push_str(line);
                }
                Mode::Output => {
                    let (_, output) = current.as_mut()?;
                    let out = output.as_mut()?;
                    if line.is_empty() {
                        continue;
                    }
                    out.push('\n');
                    out.push_str(line);
                }
                Mode::Expect => {
                    if !line.is_empty() {
                        return None;
                    }
                }
            }
        }
    }
    // The final block must be the bare test input ("Output:" with an empty
    // completion slot).
    let (test_input, final_output) = current?;
    if final_output.as_deref() != Some("") {
        return None;
    }
    let demos: Option<Vec<Demonstration>> = demos
        .into_iter()
        .map(|(input, output)| Demonstration::new(input, vec![output]).ok())
        .collect();
    Some((demos?, test_input))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo(input: &str, gold: &str) -> Demonstration {
        Demonstration::new(input, vec![gold.to_string()]).unwrap()
    }

    fn five() -> Vec<Demonstration> {
        vec![
            demo("cat", "cats"),
            demo("dog", "dogs"),
            demo("life", "lives"),
            demo("box", "boxes"),
            demo("city", "cities"),
        ]
    }

    #[test]
    fn demonstration_block_format() {
        assert_eq!(
            render_demonstration(&demo("cat", "cats")),
            "Input: cat\nOutput: cats"
        );
        // Internal newlines pass through verbatim.
        assert_eq!(
            render_demonstration(&demo("a\nb", "c")),
            "Input: a\nb\nOutput: c"
        );
    }

    #[test]
    fn induction_prompt_structure() {
        let template = PromptTemplate::default_induction();
        let rendered = render_induction_prompt(&five(), &template).unwrap();
        assert!(rendered.text.starts_with(&template.preamble));
        assert!(rendered.text.ends_with(&template.suffix));
        assert_eq!(rendered.text.matches("Input: ").count(), 5);
        assert_eq!(rendered.text.matches("Output: ").count(), 5);
        assert_eq!(rendered.demo_count, 5);

        // Byte determinism.
        let again = render_induction_prompt(&five(), &template).unwrap();
        assert_eq!(rendered.text, again.text);
    }

    #[test]
    fn induction_prompt_requires_five_demos() {
        let template = PromptTemplate::default_induction();
        let four: Vec<Demonstration> = five().into_iter().take(4).collect();
        assert!(render_induction_prompt(&four, &template).is_err());
    }

    #[test]
    fn in_context_prompt_ends_with_output_marker() {
        let rendered = render_in_context_prompt(&five(), "tree").unwrap();
        assert!(rendered.text.ends_with("Input: tree\nOutput:"));
        assert!(!rendered.text.ends_with(" "));
        let empty = render_in_context_prompt(&five(), "").unwrap();
        assert!(empty.text.ends_with("Input: \nOutput:"));
    }

    #[test]
    fn execution_prompt_shape_and_errors() {
        let rendered =
            render_execution_prompt("Write the plural form of the given word.", "cat").unwrap();
        assert_eq!(
            rendered.text,
            "Write the plural form of the given word.\n\nInput: cat\nOutput:"
        );
        let trimmed = render_execution_prompt("Add one.\n", "2").unwrap();
        assert!(trimmed.text.starts_with("Add one.\n\nInput:"));
        assert!(render_execution_prompt("", "cat").is_err());
        assert!(render_execution_prompt("  \n", "cat").is_err());
    }

    #[test]
    fn in_context_round_trip() {
        let demos = five();
        let rendered = render_in_context_prompt(&demos, "tree").unwrap();
        let (parsed, test_input) = parse_in_context_prompt(&rendered.text).unwrap();
        assert_eq!(test_input, "tree");
        assert_eq!(parsed.len(), demos.len());
        for (p, d) in parsed.iter().zip(&demos) {
            assert_eq!(p.input, d.input);
            assert_eq!(p.gold[0], d.gold[0]);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_in_context_prompt("noise").is_none());
        assert!(parse_in_context_prompt("").is_none());
    }
}
