use statcurv::harness::{generate, Family, GeneratorRecipe};

use crate::{CliError, Outcome, EXIT_OK};

/// What `examples` should generate. Without a family the family and
/// dimension are drawn from the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExamplesConfig {
    pub seed: u64,
    pub family: Option<String>,
    pub dimension: Option<usize>,
    pub squash: f64,
    pub unit: bool,
}

impl Default for ExamplesConfig {
    fn default() -> Self {
        ExamplesConfig {
            seed: 0,
            family: None,
            dimension: None,
            squash: 1.0,
            unit: true,
        }
    }
}

fn recipe(config: &ExamplesConfig) -> Result<GeneratorRecipe, CliError> {
    let mut recipe = match config.family.as_deref() {
        None => {
            let mut r = GeneratorRecipe::random(config.seed);
            if let Some(n) = config.dimension {
                r = GeneratorRecipe::new(config.seed, n, Family::WarpedRotational);
            }
            r
        }
        Some("warped-rotational") => {
            GeneratorRecipe::new(config.seed, config.dimension.unwrap_or(3), Family::WarpedRotational)
        }
        Some("product-with-flat") => {
            let n = config.dimension.unwrap_or(5);
            if n < 3 {
                return Err(CliError::Input("product-with-flat needs dimension at least 3".into()));
            }
            GeneratorRecipe::new(config.seed, n, Family::ProductWithFlat { flat_dims: n - 3 })
        }
        Some("s3-squashed") => GeneratorRecipe::new(
            config.seed,
            3,
            Family::S3Squashed {
                squash: config.squash,
            },
        ),
        Some(other) => {
            return Err(CliError::Input(format!(
                "unknown family '{other}' (expected warped-rotational, product-with-flat or s3-squashed)"
            )))
        }
    };
    recipe.unit = config.unit;
    Ok(recipe)
}

/// Emit a generated stationary structure as a spec file.
pub fn cmd_examples(config: &ExamplesConfig) -> Result<Outcome, CliError> {
    let r = recipe(config)?;
    let s = generate(&r).map_err(|e| CliError::Input(e.to_string()))?;
    let header = format!(
        "# generated: family {}, dimension {}, seed {}\n",
        r.family.tag(),
        r.dimension,
        r.seed
    );
    Ok(Outcome {
        exit_code: EXIT_OK,
        report: header + &s.to_spec().to_spec_string(),
        notices: Vec::new(),
    })
}
