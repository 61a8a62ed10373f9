//! Shared test helpers: a minimal XML well-formedness scanner for the SVG
//! outputs and preset path resolution.

use std::path::PathBuf;

/// Repo-level presets directory.
#[allow(dead_code)]
pub fn preset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../presets")
        .join(name)
}

/// Check XML well-formedness: balanced tags, quoted attribute values, one
/// root element, sane entity usage. Returns `Err(reason)` on violations.
pub fn check_xml_well_formed(text: &str) -> Result<(), String> {
    let mut stack: Vec<String> = Vec::new();
    let mut roots = 0;
    let mut chars = text.char_indices().peekable();

    while let Some((pos, ch)) = chars.next() {
        if ch != '<' {
            if ch == '&' {
                // Entity must terminate with ';' within a few characters.
                let tail: String = text[pos..].chars().take(8).collect();
                if !tail.contains(';') {
                    return Err(format!("bare '&' at byte {pos}"));
                }
            }
            continue;
        }
        // Collect the tag up to the matching '>'; respect quoted values.
        let mut tag = String::new();
        let mut in_quote = false;
        let mut closed = false;
        for (_, c) in chars.by_ref() {
            match c {
                '"' => {
                    in_quote = !in_quote;
                    tag.push(c);
                }
                '>' if !in_quote => {
                    closed = true;
                    break;
                }
                '<' if !in_quote => return Err(format!("nested '<' at byte {pos}")),
                _ => tag.push(c),
            }
        }
        if !closed {
            return Err(format!("unterminated tag at byte {pos}"));
        }
        if in_quote {
            return Err(format!("unterminated attribute quote at byte {pos}"));
        }
        let tag = tag.trim().to_string();
        if tag.starts_with('?') || tag.starts_with('!') {
            continue; // prolog / doctype / comment
        }
        if let Some(name) = tag.strip_prefix('/') {
            let expect = stack.pop().ok_or_else(|| format!("unmatched </{name}>"))?;
            if expect != name.trim() {
                return Err(format!("tag mismatch: <{expect}> closed by </{name}>"));
            }
            continue;
        }
        let self_closing = tag.ends_with('/');
        let body = tag.trim_end_matches('/');
        let name = body.split_whitespace().next().unwrap_or_default().to_string();
        if name.is_empty() {
            return Err(format!("empty tag at byte {pos}"));
        }
        // Attributes: every '=' must be followed by a quoted value.
        let attrs = &body[name.len()..];
        let mut rest = attrs.trim_start();
        while let Some(eq) = rest.find('=') {
            let after = rest[eq + 1..].trim_start();
            if !after.starts_with('"') {
                return Err(format!("unquoted attribute value in <{name}>"));
            }
            let close = after[1..]
                .find('"')
                .ok_or_else(|| format!("unterminated attribute in <{name}>"))?;
            rest = &after[close + 2..];
        }
        if stack.is_empty() {
            roots += 1;
            if roots > 1 && !self_closing {
                return Err("multiple root elements".into());
            }
        }
        if !self_closing {
            stack.push(name);
        } else if stack.is_empty() && roots > 1 {
            return Err("multiple root elements".into());
        }
    }
    if !stack.is_empty() {
        return Err(format!("unclosed tags: {stack:?}"));
    }
    if roots == 0 {
        return Err("no root element".into());
    }
    Ok(())
}

#[allow(dead_code)]
pub fn assert_valid_svg(text: &str) {
    check_xml_well_formed(text).expect("SVG must be well-formed XML");
    assert!(text.contains("<svg"), "missing svg root");
    assert!(text.contains("http://www.w3.org/2000/svg"), "missing SVG namespace");
    assert!(text.contains("version=\"1.1\""), "missing SVG 1.1 version");
}
