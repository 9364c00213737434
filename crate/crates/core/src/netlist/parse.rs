use super::{
    parse_value, AnalysisDirective, ModelCard, NetlistError, NetlistErrorKind, RawLine,
    RawNetlist, Record, Waveform,
};
use crate::devices::{BjtParams, MemristorParams, Window};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String),
    Open,
    Close,
    Equals,
}

fn tokenize(line: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    let flush = |word: &mut String, tokens: &mut Vec<Token>| {
        if !word.is_empty() {
            tokens.push(Token::Word(std::mem::take(word)));
        }
    };
    for ch in line.chars() {
        match ch {
            '(' | ')' | '=' => {
                flush(&mut word, &mut tokens);
                tokens.push(match ch {
                    '(' => Token::Open,
                    ')' => Token::Close,
                    _ => Token::Equals,
                });
            }
            c if c.is_whitespace() || c == ',' => flush(&mut word, &mut tokens),
            c => word.push(c),
        }
    }
    flush(&mut word, &mut tokens);
    tokens
}

/// Joins continuation lines and drops comments and blank lines. Returns
/// logical lines tagged with the number of their first physical line.
fn logical_lines(body: &str, first_line: usize) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for (offset, raw) in body.lines().enumerate() {
        let line_no = first_line + offset;
        let text = raw.split(';').next().unwrap_or("").trim();
        if text.is_empty() || text.starts_with('*') {
            continue;
        }
        if let Some(rest) = text.strip_prefix('+') {
            if let Some(last) = out.last_mut() {
                last.1.push(' ');
                last.1.push_str(rest);
                continue;
            }
        }
        out.push((line_no, text.to_string()));
    }
    out
}

/// Splits netlist text into a title and typed records.
pub fn parse_netlist(text: &str) -> Result<RawNetlist, NetlistError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let (title, body) = match text.split_once('\n') {
        Some((t, b)) => (t, b),
        None => (text, ""),
    };
    let mut lines = Vec::new();
    for (line_no, logical) in logical_lines(body, 2) {
        let tokens = tokenize(&logical);
        if let Some(Token::Word(w)) = tokens.first() {
            if w.eq_ignore_ascii_case(".end") {
                break;
            }
        }
        let record = parse_record(&tokens).map_err(|e| e.with_line(line_no))?;
        lines.push(RawLine {
            line: line_no,
            record,
        });
    }
    Ok(RawNetlist {
        title: title.trim_end_matches('\r').trim().to_string(),
        lines,
    })
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(tokens: &'a [Token]) -> Self {
        Self { tokens, pos: 0 }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_word(&self) -> Option<&'a str> {
        match self.peek() {
            Some(Token::Word(w)) => Some(w),
            _ => None,
        }
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn word(&mut self, what: &str) -> Result<&'a str, NetlistError> {
        match self.next() {
            Some(Token::Word(w)) => Ok(w),
            _ => Err(syntax(format!("expected {what}"))),
        }
    }

    fn value(&mut self, what: &str) -> Result<f64, NetlistError> {
        parse_value(self.word(what)?)
    }

    fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == Some(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &Token, what: &str) -> Result<(), NetlistError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(syntax(format!("expected {what}")))
        }
    }

    fn finish(&self) -> Result<(), NetlistError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(syntax(format!("unexpected trailing token {}", describe(t)))),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }
}

fn describe(t: &Token) -> String {
    match t {
        Token::Word(w) => format!("`{w}`"),
        Token::Open => "`(`".into(),
        Token::Close => "`)`".into(),
        Token::Equals => "`=`".into(),
    }
}

fn syntax(msg: String) -> NetlistError {
    NetlistError::new(NetlistErrorKind::Syntax(msg))
}

fn invalid(msg: String) -> NetlistError {
    NetlistError::new(NetlistErrorKind::InvalidParameter(msg))
}

fn parse_record(tokens: &[Token]) -> Result<Record, NetlistError> {
    let mut cur = Cursor::new(tokens);
    let head = cur.word("element or directive")?;
    if head.starts_with('.') {
        return parse_directive(head, &mut cur);
    }
    let name = head.to_string();
    let letter = head.chars().next().unwrap_or(' ').to_ascii_uppercase();
    let record = match letter {
        'R' => {
            let pos = node(&mut cur)?;
            let neg = node(&mut cur)?;
            let resistance = cur.value("resistance")?;
            if !(resistance > 0.0 && resistance.is_finite()) {
                return Err(invalid(format!("resistance of {name} must be positive")));
            }
            Record::Resistor {
                name,
                pos,
                neg,
                resistance,
            }
        }
        'V' => {
            let pos = node(&mut cur)?;
            let neg = node(&mut cur)?;
            let waveform = parse_waveform(&mut cur)?;
            Record::VoltageSource {
                name,
                pos,
                neg,
                waveform,
            }
        }
        'I' => {
            let pos = node(&mut cur)?;
            let neg = node(&mut cur)?;
            if cur
                .peek_word()
                .is_some_and(|w| w.eq_ignore_ascii_case("dc"))
            {
                cur.next();
            }
            let dc = cur.value("current")?;
            Record::CurrentSource { name, pos, neg, dc }
        }
        'Q' => Record::Bjt {
            name,
            collector: node(&mut cur)?,
            base: node(&mut cur)?,
            emitter: node(&mut cur)?,
            model: cur.word("model name")?.to_string(),
        },
        'M' => {
            let pos = node(&mut cur)?;
            let neg = node(&mut cur)?;
            let model = cur.word("model name")?.to_string();
            let mut x_init = None;
            while !cur.at_end() {
                let key = cur.word("instance parameter")?;
                cur.expect(&Token::Equals, "`=`")?;
                let v = cur.value("parameter value")?;
                if key.eq_ignore_ascii_case("xinit") {
                    x_init = Some(v);
                } else {
                    return Err(invalid(format!("unknown memristor instance parameter `{key}`")));
                }
            }
            Record::Memristor {
                name,
                pos,
                neg,
                model,
                x_init,
            }
        }
        _ => {
            return Err(NetlistError::new(NetlistErrorKind::UnknownElement(name)));
        }
    };
    cur.finish()?;
    Ok(record)
}

fn node(cur: &mut Cursor<'_>) -> Result<String, NetlistError> {
    Ok(cur.word("node name")?.to_ascii_lowercase())
}

fn parse_waveform(cur: &mut Cursor<'_>) -> Result<Waveform, NetlistError> {
    let w = cur.word("source value")?;
    if w.eq_ignore_ascii_case("dc") {
        return Ok(Waveform::Dc(cur.value("DC value")?));
    }
    if w.eq_ignore_ascii_case("sin") {
        cur.expect(&Token::Open, "`(` after SIN")?;
        let offset = cur.value("SIN offset")?;
        let amplitude = cur.value("SIN amplitude")?;
        let frequency = cur.value("SIN frequency")?;
        cur.expect(&Token::Close, "`)` closing SIN (phase, delay and damping are not supported)")?;
        if !(frequency > 0.0) {
            return Err(invalid("SIN frequency must be positive".into()));
        }
        return Ok(Waveform::Sin {
            offset,
            amplitude,
            frequency,
        });
    }
    Ok(Waveform::Dc(parse_value(w)?))
}

fn parse_directive(head: &str, cur: &mut Cursor<'_>) -> Result<Record, NetlistError> {
    let lower = head.to_ascii_lowercase();
    let record = match lower.as_str() {
        ".model" => {
            let name = cur.word("model name")?.to_string();
            let kind = cur.word("model type")?.to_ascii_uppercase();
            let parens = cur.eat(&Token::Open);
            let mut params = Vec::new();
            while let Some(Token::Word(key)) = cur.peek() {
                cur.next();
                cur.expect(&Token::Equals, "`=` after model parameter")?;
                params.push((key.to_ascii_uppercase(), cur.value("model parameter value")?));
            }
            if parens {
                cur.expect(&Token::Close, "`)` closing model parameters")?;
            }
            let card = match kind.as_str() {
                "NPN" => ModelCard::Npn(bjt_card(&params)?),
                "MEMR" => ModelCard::Memristor(memristor_card(&params)?),
                other => return Err(invalid(format!("unsupported model type `{other}`"))),
            };
            Record::Model { name, card }
        }
        ".op" => Record::Directive(AnalysisDirective::Op),
        ".dc" => {
            let source = cur.word("sweep source")?.to_string();
            let start = cur.value("sweep start")?;
            let stop = cur.value("sweep stop")?;
            let step = cur.value("sweep step")?;
            if !(step > 0.0) || stop < start {
                return Err(invalid(
                    "DC sweep needs step > 0 and stop >= start".into(),
                ));
            }
            Record::Directive(AnalysisDirective::DcSweep {
                source,
                start,
                stop,
                step,
            })
        }
        ".tran" => {
            let tstep = cur.value("tstep")?;
            let tstop = cur.value("tstop")?;
            let tstart = if cur.at_end() {
                0.0
            } else {
                cur.value("tstart")?
            };
            if !(tstep > 0.0) || !(tstart >= 0.0) || !(tstop > tstart) {
                return Err(invalid(
                    "transient needs tstep > 0 and tstop > tstart >= 0".into(),
                ));
            }
            Record::Directive(AnalysisDirective::Tran {
                tstep,
                tstop,
                tstart,
            })
        }
        ".four" => {
            let fundamental = cur.value("fundamental frequency")?;
            if !(fundamental > 0.0) {
                return Err(invalid("fundamental frequency must be positive".into()));
            }
            let mut harmonics = 9;
            if let Some(w) = cur.peek_word() {
                if let Ok(n) = parse_value(w) {
                    cur.next();
                    if n.fract() != 0.0 || n < 2.0 {
                        return Err(invalid("harmonic count must be an integer >= 2".into()));
                    }
                    harmonics = n as usize;
                }
            }
            let mut signals = Vec::new();
            while !cur.at_end() {
                signals.push(signal_name(cur)?);
            }
            if signals.is_empty() {
                return Err(syntax(".four needs at least one signal".into()));
            }
            Record::Directive(AnalysisDirective::Four {
                fundamental,
                harmonics,
                signals,
            })
        }
        _ => {
            return Err(NetlistError::new(NetlistErrorKind::UnknownDirective(
                head.to_string(),
            )))
        }
    };
    cur.finish()?;
    Ok(record)
}

/// Reassembles `V ( out )` into `V(out)`.
fn signal_name(cur: &mut Cursor<'_>) -> Result<String, NetlistError> {
    let func = cur.word("signal name")?;
    cur.expect(&Token::Open, "`(` in signal name")?;
    let arg = cur.word("signal argument")?;
    cur.expect(&Token::Close, "`)` in signal name")?;
    Ok(format!("{func}({arg})"))
}

fn bjt_card(params: &[(String, f64)]) -> Result<BjtParams, NetlistError> {
    let mut p = BjtParams::default();
    for (key, v) in params {
        match key.as_str() {
            "IS" => p.is_sat = *v,
            "BF" => p.bf = *v,
            "VAF" => p.vaf = *v,
            "BR" => p.br = *v,
            other => return Err(invalid(format!("unknown NPN parameter `{other}`"))),
        }
    }
    p.validate().map_err(invalid)?;
    Ok(p)
}

fn memristor_card(params: &[(String, f64)]) -> Result<MemristorParams, NetlistError> {
    let mut p = MemristorParams::default();
    for (key, v) in params {
        match key.as_str() {
            "RON" => p.r_on = *v,
            "ROFF" => p.r_off = *v,
            "D" => p.d = *v,
            "UV" => p.mu_v = *v,
            "P" => {
                if v.fract() != 0.0 || *v < 1.0 {
                    return Err(invalid("memristor P must be an integer >= 1".into()));
                }
                p.p = *v as u32;
            }
            "XINIT" => p.x_init = *v,
            "WINDOW" => {
                p.window = if *v == 0.0 {
                    Window::None
                } else {
                    Window::Joglekar
                }
            }
            other => return Err(invalid(format!("unknown MEMR parameter `{other}`"))),
        }
    }
    p.validate().map_err(invalid)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_resistor() {
        let raw = parse_netlist("t\nR1 1 0 1k\n.end").unwrap();
        assert_eq!(raw.title, "t");
        assert_eq!(raw.lines.len(), 1);
        assert_eq!(
            raw.lines[0].record,
            Record::Resistor {
                name: "R1".into(),
                pos: "1".into(),
                neg: "0".into(),
                resistance: 1000.0
            }
        );
    }

    #[test]
    fn bjt_record() {
        let raw = parse_netlist("t\nQ1 c b e NMOD\n").unwrap();
        assert_eq!(
            raw.lines[0].record,
            Record::Bjt {
                name: "Q1".into(),
                collector: "c".into(),
                base: "b".into(),
                emitter: "e".into(),
                model: "NMOD".into()
            }
        );
    }

    #[test]
    fn comments_blanks_and_end() {
        let raw = parse_netlist("t\n* comment\n\nR1 1 0 1k ; trailing\n.end\nR2 1 0 1k\n").unwrap();
        assert_eq!(raw.lines.len(), 1);
        assert_eq!(raw.lines[0].line, 4);
    }

    #[test]
    fn continuation_lines() {
        let raw = parse_netlist("t\n.model m NPN(IS=1e-15\n+ BF=50)\n").unwrap();
        match &raw.lines[0].record {
            Record::Model {
                card: ModelCard::Npn(p),
                ..
            } => {
                assert_eq!(p.is_sat, 1e-15);
                assert_eq!(p.bf, 50.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sources_and_directives() {
        let raw = parse_netlist(
            "t\nV1 a 0 SIN(0 1 1k)\nV2 b 0 5\nI1 0 a DC 1m\n.dc V2 0 10 0.1\n.tran 1u 5m\n.four 1k I(V1) V(a)\n",
        )
        .unwrap();
        let recs: Vec<_> = raw.lines.iter().map(|l| &l.record).collect();
        assert!(matches!(
            recs[0],
            Record::VoltageSource { waveform: Waveform::Sin { frequency, .. }, .. } if *frequency == 1000.0
        ));
        assert!(matches!(recs[1], Record::VoltageSource { waveform: Waveform::Dc(v), .. } if *v == 5.0));
        assert!(matches!(recs[2], Record::CurrentSource { dc, .. } if *dc == 1e-3));
        assert!(matches!(recs[4], Record::Directive(AnalysisDirective::Tran { tstart, .. }) if *tstart == 0.0));
        assert_eq!(
            *recs[5],
            Record::Directive(AnalysisDirective::Four {
                fundamental: 1000.0,
                harmonics: 9,
                signals: vec!["I(V1)".into(), "V(a)".into()]
            })
        );
    }

    #[test]
    fn memristor_instance_and_card() {
        let raw = parse_netlist(
            "t\nM1 a 0 mem xinit=0.25\n.model mem MEMR(RON=50 ROFF=20k D=5n UV=1e-14 P=2 WINDOW=0)\n",
        )
        .unwrap();
        assert!(matches!(raw.lines[0].record, Record::Memristor { x_init: Some(x), .. } if x == 0.25));
        match &raw.lines[1].record {
            Record::Model {
                card: ModelCard::Memristor(p),
                ..
            } => {
                assert_eq!(p.r_on, 50.0);
                assert_eq!(p.r_off, 20e3);
                assert_eq!(p.d, 5e-9);
                assert_eq!(p.p, 2);
                assert_eq!(p.window, Window::None);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn diagnostics_name_line_and_token() {
        let err = parse_netlist("t\nR1 1 0 1k\nX1 1 0 foo\n").unwrap_err();
        assert_eq!(err.line, Some(3));
        assert_eq!(err.kind, NetlistErrorKind::UnknownElement("X1".into()));

        let err = parse_netlist("t\n.ac dec 10 1 1k\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert_eq!(err.kind, NetlistErrorKind::UnknownDirective(".ac".into()));

        let err = parse_netlist("t\n\nR1 1 0 1x.5\n").unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(matches!(err.kind, NetlistErrorKind::BadValue(_)));
    }

    #[test]
    fn directive_invariants() {
        for bad in [
            ".dc V1 0 10 0",
            ".dc V1 10 0 0.1",
            ".tran 0 1m",
            ".tran 1u 1m 2m",
            ".four 0 V(a)",
            ".four 1k 1 V(a)",
        ] {
            let text = format!("t\n{bad}\n");
            assert!(parse_netlist(&text).is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn bad_model_parameters() {
        assert!(parse_netlist("t\n.model q NPN(IS=-1)\n").is_err());
        assert!(parse_netlist("t\n.model q NPN(FOO=1)\n").is_err());
        assert!(parse_netlist("t\n.model m MEMR(RON=20k ROFF=1k)\n").is_err());
        assert!(parse_netlist("t\n.model m MEMR(XINIT=1.5)\n").is_err());
        assert!(parse_netlist("t\n.model m PNP(IS=1e-14)\n").is_err());
    }
}
