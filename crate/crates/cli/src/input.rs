use std::fs;
use std::path::Path;

use pmlkit::io::{parse_channel_csv, parse_model_json, parse_prior};
use pmlkit::JointModel;
use serde::de::DeserializeOwned;

use crate::args::ModelArgs;
use crate::error::{CliError, CliResult};

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })
}

fn in_file<T>(path: &Path, r: pmlkit::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::File {
        path: path.to_owned(),
        source,
    })
}

fn is_csv(path: &Path, text: &str) -> bool {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => ext.eq_ignore_ascii_case("csv"),
        None => !text.trim_start().starts_with('{'),
    }
}

pub fn load_model(args: &ModelArgs) -> CliResult<JointModel> {
    let text = read(&args.channel)?;
    let prior = match &args.prior {
        Some(p) => Some((p.as_path(), in_file(p, parse_prior(&read(p)?))?)),
        None => None,
    };
    if is_csv(&args.channel, &text) {
        let csv = in_file(&args.channel, parse_channel_csv(&text))?;
        let Some((prior_path, prior)) = prior else {
            return Err(CliError::Usage("a CSV channel needs --prior".into()));
        };
        let inputs = prior
            .alphabet
            .as_ref()
            .map(|a| pmlkit::Alphabet::new(a.clone()))
            .transpose()?;
        let channel = in_file(&args.channel, csv.channel(inputs.as_ref()))?;
        let prior = in_file(prior_path, prior.distribution(channel.input()))?;
        Ok(JointModel::new(prior, channel)?)
    } else {
        let file = in_file(&args.channel, parse_model_json(&text))?;
        let prior = match prior {
            Some((path, p)) => {
                let channel = in_file(&args.channel, file.channel())?;
                Some(in_file(path, p.distribution(channel.input()))?)
            }
            None => None,
        };
        in_file(&args.channel, file.model(prior))
    }
}

/// Inline JSON, or the path of a JSON file.
pub fn json_or_path<T: DeserializeOwned>(arg: &str, what: &str) -> CliResult<T> {
    let (text, origin) = if arg.trim_start().starts_with('{') {
        (arg.to_owned(), "inline".to_owned())
    } else {
        let path = Path::new(arg);
        (read(path)?, path.display().to_string())
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{what} ({origin}): {e}")))
}
