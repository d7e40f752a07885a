use std::collections::BTreeMap;

use super::{DiagramError, PlaneDiagram};

struct Token {
    body: TokenBody,
}

enum TokenBody {
    Circle,
    Crossing([u64; 4]),
}

fn syntax(line: usize, token: &str, message: &str) -> DiagramError {
    DiagramError::Syntax {
        line,
        token: token.to_string(),
        message: message.to_string(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>, DiagramError> {
    let mut tokens = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = content.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            if chars[i].is_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            match chars[i] {
                'O' => {
                    i += 1;
                    if i < chars.len() && !chars[i].is_whitespace() {
                        let end = chars[i..]
                            .iter()
                            .position(|c| c.is_whitespace())
                            .map_or(chars.len(), |p| p + i);
                        let tok: String = chars[start..end].iter().collect();
                        return Err(syntax(line, &tok, "unexpected characters after `O`"));
                    }
                    tokens.push(Token {
                        body: TokenBody::Circle,
                    });
                }
                'X' => {
                    let close = chars[i..].iter().position(|&c| c == ')').map(|p| p + i);
                    let Some(close) = close else {
                        let tok: String = chars[start..].iter().collect();
                        return Err(syntax(line, tok.trim_end(), "missing `)`"));
                    };
                    let tok: String = chars[start..=close].iter().collect();
                    i = close + 1;
                    if i < chars.len() && !chars[i].is_whitespace() {
                        return Err(syntax(line, &tok, "tokens must be separated by whitespace"));
                    }
                    let inner = tok[1..].trim_start();
                    let Some(inner) = inner.strip_prefix('(') else {
                        return Err(syntax(line, &tok, "expected `(` after `X`"));
                    };
                    let inner = &inner[..inner.len() - 1];
                    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
                    if parts.len() != 4 {
                        return Err(syntax(line, &tok, "a crossing lists exactly 4 arc labels"));
                    }
                    let mut labels = [0u64; 4];
                    for (slot, p) in parts.iter().enumerate() {
                        if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                            return Err(syntax(line, &tok, "arc labels must be positive integers"));
                        }
                        let v: u64 = p
                            .parse()
                            .map_err(|_| syntax(line, &tok, "arc label out of range"))?;
                        if v == 0 {
                            return Err(syntax(line, &tok, "arc labels must be positive"));
                        }
                        labels[slot] = v;
                    }
                    tokens.push(Token {
                        body: TokenBody::Crossing(labels),
                    });
                }
                _ => {
                    let end = chars[i..]
                        .iter()
                        .position(|c| c.is_whitespace())
                        .map_or(chars.len(), |p| p + i);
                    let tok: String = chars[start..end].iter().collect();
                    return Err(syntax(line, &tok, "expected `X(a,b,c,d)` or `O`"));
                }
            }
        }
    }
    Ok(tokens)
}

/// Parses PD text: whitespace-separated `X(a,b,c,d)` crossings and `O`
/// crossing-free circles, `#` comments to end of line. Arc labels are
/// renumbered densely in increasing label order.
pub fn parse_pd(text: &str) -> Result<PlaneDiagram, DiagramError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(DiagramError::Empty);
    }
    let mut count: BTreeMap<u64, usize> = BTreeMap::new();
    let mut free = 0;
    for t in &tokens {
        match &t.body {
            TokenBody::Circle => free += 1,
            TokenBody::Crossing(labels) => {
                for &l in labels {
                    *count.entry(l).or_default() += 1;
                }
            }
        }
    }
    if let Some((&label, &c)) = count.iter().find(|(_, &c)| c != 2) {
        return Err(DiagramError::ArcLabelCount { label, count: c });
    }
    let dense: BTreeMap<u64, usize> = count.keys().enumerate().map(|(i, &l)| (l, i)).collect();
    let crossings = tokens
        .iter()
        .filter_map(|t| match &t.body {
            TokenBody::Crossing(l) => Some(l.map(|x| dense[&x])),
            TokenBody::Circle => None,
        })
        .collect();
    PlaneDiagram::from_slots(crossings, free)
}

/// Writes PD text with arcs labelled `1..=E` and one `O` per free circle.
pub fn serialize_pd(d: &PlaneDiagram) -> String {
    let mut parts: Vec<String> = d
        .crossings()
        .iter()
        .map(|s| format!("X({},{},{},{})", s[0] + 1, s[1] + 1, s[2] + 1, s[3] + 1))
        .collect();
    parts.extend(std::iter::repeat_n("O".to_string(), d.free_circles()));
    parts.join(" ")
}
