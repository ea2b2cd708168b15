//! Prompt rendering: textual topology templates, DOT sources for the five
//! visual layouts, rasterization via an external Graphviz-compatible binary,
//! and full prompt assembly (topology + task instruction + control
//! instruction + optional chain-of-thought suffix).

mod prompt;
mod raster;
mod textual;
mod visual;

pub use prompt::{assemble_prompt, control_instruction, task_instruction, RenderedPrompt, COT_SUFFIX};
pub use raster::Rasterizer;
pub use textual::render_textual;
pub use visual::render_visual;
