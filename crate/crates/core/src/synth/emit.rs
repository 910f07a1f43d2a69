use std::io::Write;

use chrono::{Duration, NaiveTime};

use super::generate::SynthCorpus;
use crate::corpus::MessageRecord;
use crate::error::Result;
use crate::stats::{derive_seed, fisher_yates, PermutationPlan};

#[derive(Debug, Clone, Copy)]
pub struct MessageLayout {
    pub tokens_per_message: usize,
    pub traders: usize,
    pub seed: u64,
}

impl MessageLayout {
    pub fn new(seed: u64) -> Self {
        Self {
            tokens_per_message: 40,
            traders: 150,
            seed,
        }
    }
}

/// Writes the corpus as JSON Lines messages whose tokens reproduce the
/// matrix exactly. Each day's tokens are shuffled with stream `t` of the
/// layout seed and cut into messages stamped one second apart from 13:30
/// UTC. Returns the number of messages written.
pub fn write_messages<W: Write>(corpus: &SynthCorpus, layout: &MessageLayout, mut out: W) -> Result<usize> {
    let m = &corpus.matrix;
    let plan = PermutationPlan::new(derive_seed(layout.seed, 7), m.n_dates());
    let open = NaiveTime::from_hms_opt(13, 30, 0).expect("valid time");
    let per = layout.tokens_per_message.max(1);
    let traders = layout.traders.max(2);
    let mut written = 0;
    for (t, date) in m.dates().iter().enumerate() {
        let mut tokens: Vec<&str> = Vec::new();
        for w in 0..m.n_words() {
            for _ in 0..m.count(t, w) {
                tokens.push(&m.words()[w]);
            }
        }
        let mut rng = plan.rng(t);
        fisher_yates(&mut tokens, &mut rng);
        for (k, chunk) in tokens.chunks(per).enumerate() {
            let ts = date.and_time(open) + Duration::seconds(k as i64);
            let rec = MessageRecord {
                timestamp: ts.and_utc(),
                sender: format!("trader{:03}", (t + k) % traders + 1),
                receiver: format!("trader{:03}", (t + 3 * k + 1) % traders + 1),
                text: chunk.join(" "),
            };
            writeln!(out, "{}", rec.to_json_line()).map_err(|e| crate::Error::io("<messages>", e))?;
            written += 1;
        }
    }
    Ok(written)
}
