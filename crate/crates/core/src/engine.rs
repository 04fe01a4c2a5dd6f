//! Event-driven replay of online instances against policies.
//!
//! Vertex `v` arrives at slot `σ(v)` and is critical at `σ(v) + d_v`. Within a
//! slot all arrivals are processed before all critical events, each kind in
//! increasing vertex order; critical vertices leave at the end of the slot.
//! On arrival a policy sees the weights to the vertices currently present and
//! nothing else.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{validate_matching, OnlineInstance, Role, ScheduledPair};
use crate::rational::Rational;

pub type Pair = (usize, usize);

/// Source of fair coin flips for randomized policies.
pub trait CoinSource {
    fn flip(&mut self) -> bool;
}

/// Counter-based stream seeded from a `u64`.
pub struct SeededCoins {
    rng: ChaCha8Rng,
    buf: u64,
    left: u32,
}

impl SeededCoins {
    pub fn new(seed: u64) -> Self {
        SeededCoins {
            rng: ChaCha8Rng::seed_from_u64(seed),
            buf: 0,
            left: 0,
        }
    }
}

impl CoinSource for SeededCoins {
    fn flip(&mut self) -> bool {
        if self.left == 0 {
            self.buf = self.rng.next_u64();
            self.left = 64;
        }
        let bit = self.buf & 1 == 1;
        self.buf >>= 1;
        self.left -= 1;
        bit
    }
}

/// Replays a fixed prefix of flips, then answers `false`, recording every
/// draw. Used to walk the tree of random branches.
#[derive(Clone, Debug, Default)]
pub struct ScriptedCoins {
    prefix: Vec<bool>,
    drawn: Vec<bool>,
}

impl ScriptedCoins {
    pub fn new(prefix: Vec<bool>) -> Self {
        ScriptedCoins {
            prefix,
            drawn: Vec::new(),
        }
    }

    pub fn drawn(&self) -> &[bool] {
        &self.drawn
    }
}

impl CoinSource for ScriptedCoins {
    fn flip(&mut self) -> bool {
        let bit = self.prefix.get(self.drawn.len()).copied().unwrap_or(false);
        self.drawn.push(bit);
        bit
    }
}

/// Stable sub-seed for stream `label`/`index` under a base seed.
pub fn derive_seed(base: u64, label: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    splitmix(splitmix(base ^ h) ^ index)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// What a policy learns before the first event.
#[derive(Clone, Copy, Debug)]
pub struct RunSetup<'a> {
    pub n: usize,
    /// The common patience when departures are deterministic.
    pub deadline: Option<usize>,
    pub roles: Option<&'a [Role]>,
}

/// Read-only view of the market plus the coin stream, handed to each hook.
pub struct PolicyContext<'a> {
    time: usize,
    coins: &'a mut dyn CoinSource,
    present: &'a [bool],
    matched: &'a [bool],
}

impl PolicyContext<'_> {
    pub fn time(&self) -> usize {
        self.time
    }

    pub fn flip(&mut self) -> bool {
        self.coins.flip()
    }

    pub fn is_present(&self, v: usize) -> bool {
        self.present[v]
    }

    pub fn is_matched(&self, v: usize) -> bool {
        self.matched[v]
    }
}

/// An online matching algorithm.
///
/// `start` is called once per run and must reset all state, so one value
/// can be replayed many times.
pub trait OnlinePolicy {
    fn name(&self) -> String;

    /// Extra slots every vertex is kept around (batching with lookahead).
    fn lookahead(&self) -> usize {
        0
    }

    fn requires_constrained_bipartite(&self) -> bool {
        false
    }

    fn requires_deterministic_deadline(&self) -> bool {
        false
    }

    fn start(&mut self, setup: &RunSetup<'_>) -> Result<()>;

    /// `revealed` lists `(u, v_uv)` for every vertex `u` present when `v`
    /// arrives, in increasing `u`.
    fn on_arrival(
        &mut self,
        ctx: &mut PolicyContext<'_>,
        v: usize,
        revealed: &[(usize, Rational)],
    ) -> Result<Vec<Pair>>;

    fn on_critical(&mut self, ctx: &mut PolicyContext<'_>, v: usize) -> Result<Vec<Pair>>;
}

impl<P: OnlinePolicy + ?Sized> OnlinePolicy for Box<P> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn lookahead(&self) -> usize {
        (**self).lookahead()
    }
    fn requires_constrained_bipartite(&self) -> bool {
        (**self).requires_constrained_bipartite()
    }
    fn requires_deterministic_deadline(&self) -> bool {
        (**self).requires_deterministic_deadline()
    }
    fn start(&mut self, setup: &RunSetup<'_>) -> Result<()> {
        (**self).start(setup)
    }
    fn on_arrival(
        &mut self,
        ctx: &mut PolicyContext<'_>,
        v: usize,
        revealed: &[(usize, Rational)],
    ) -> Result<Vec<Pair>> {
        (**self).on_arrival(ctx, v, revealed)
    }
    fn on_critical(&mut self, ctx: &mut PolicyContext<'_>, v: usize) -> Result<Vec<Pair>> {
        (**self).on_critical(ctx, v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    Arrival,
    Critical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    pub time: usize,
    pub kind: EventKind,
    pub vertex: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub event: Event,
    pub finalized: Vec<Pair>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub pairs: Vec<ScheduledPair>,
    pub collected: Rational,
    pub trace: Vec<TraceEntry>,
}

/// The event sequence of an instance, in processing order.
pub fn events(inst: &OnlineInstance) -> Vec<Event> {
    let n = inst.n();
    let horizon = (1..=n).map(|v| inst.critical(v)).max().unwrap_or(0);
    let mut by_time: Vec<Vec<usize>> = vec![Vec::new(); horizon + 1];
    for v in 1..=n {
        by_time[inst.critical(v)].push(v);
    }
    let mut out = Vec::with_capacity(2 * n);
    for (t, crit) in by_time.iter_mut().enumerate().skip(1) {
        if t <= n {
            out.push(Event {
                time: t,
                kind: EventKind::Arrival,
                vertex: inst.sigma.vertex_at(t),
            });
        }
        crit.sort_unstable();
        out.extend(crit.iter().map(|&v| Event {
            time: t,
            kind: EventKind::Critical,
            vertex: v,
        }));
    }
    out
}

/// Run with coins drawn from `seed`.
pub fn simulate<P: OnlinePolicy + ?Sized>(
    inst: &OnlineInstance,
    policy: &mut P,
    seed: u64,
) -> Result<RunResult> {
    simulate_with_coins(inst, policy, &mut SeededCoins::new(seed))
}

pub fn simulate_with_coins<P: OnlinePolicy + ?Sized>(
    inst: &OnlineInstance,
    policy: &mut P,
    coins: &mut dyn CoinSource,
) -> Result<RunResult> {
    inst.validate()?;
    if policy.requires_constrained_bipartite() {
        inst.check_constrained_bipartite()?;
    }
    if policy.requires_deterministic_deadline() && inst.departures.is_some() {
        return Err(Error::Invalid(format!(
            "{} needs a common deadline, not per-vertex departures",
            policy.name()
        )));
    }
    let extra = policy.lookahead();
    let eff = if extra > 0 {
        inst.extended(extra)
    } else {
        inst.clone()
    };
    let n = inst.n();
    policy.start(&RunSetup {
        n,
        deadline: inst.departures.is_none().then_some(inst.deadline),
        roles: inst.roles.as_deref(),
    })?;

    let mut present = vec![false; n + 1];
    let mut matched = vec![false; n + 1];
    let mut pairs = Vec::new();
    let mut trace = Vec::new();
    let mut collected = Rational::zero();
    let mut leaving = Vec::new();
    let evs = events(&eff);
    for (idx, ev) in evs.iter().enumerate() {
        let out = match ev.kind {
            EventKind::Arrival => {
                present[ev.vertex] = true;
                let revealed: Vec<(usize, Rational)> = (1..=n)
                    .filter(|&u| u != ev.vertex && present[u])
                    .map(|u| (u, eff.graph.weight(u, ev.vertex).clone()))
                    .collect();
                let mut ctx = PolicyContext {
                    time: ev.time,
                    coins: &mut *coins,
                    present: &present,
                    matched: &matched,
                };
                policy.on_arrival(&mut ctx, ev.vertex, &revealed)?
            }
            EventKind::Critical => {
                let mut ctx = PolicyContext {
                    time: ev.time,
                    coins: &mut *coins,
                    present: &present,
                    matched: &matched,
                };
                leaving.push(ev.vertex);
                policy.on_critical(&mut ctx, ev.vertex)?
            }
        };
        for &(u, v) in &out {
            let violation = |reason: String| Error::PolicyViolation {
                policy: policy.name(),
                time: ev.time,
                reason,
            };
            if u == v || u == 0 || v == 0 || u > n || v > n {
                return Err(violation(format!("bad pair ({u}, {v})")));
            }
            if !present[u] || !present[v] {
                return Err(violation(format!("pair ({u}, {v}) is not present")));
            }
            if matched[u] || matched[v] {
                return Err(violation(format!("pair ({u}, {v}) reuses a matched vertex")));
            }
            let w = eff.graph.weight(u, v);
            if !w.is_positive() {
                return Err(violation(format!("pair ({u}, {v}) is not an edge")));
            }
            matched[u] = true;
            matched[v] = true;
            collected += w;
            pairs.push(ScheduledPair { u, v, time: ev.time });
        }
        trace.push(TraceEntry {
            event: *ev,
            finalized: out,
        });
        let end_of_slot = evs.get(idx + 1).is_none_or(|next| next.time != ev.time);
        if end_of_slot {
            for v in leaving.drain(..) {
                present[v] = false;
            }
        }
    }
    validate_matching(&eff, &pairs)?;
    Ok(RunResult {
        pairs,
        collected,
        trace,
    })
}

/// Largest number of random branches [`for_each_branch`] will walk.
pub const BRANCH_CAP: u64 = 1 << 20;

/// Run every branch of the policy's coin tree, calling `f` with the branch
/// probability, the run, and the policy state after the run.
pub fn for_each_branch<P, F>(inst: &OnlineInstance, policy: &mut P, mut f: F) -> Result<u64>
where
    P: OnlinePolicy + ?Sized,
    F: FnMut(&Rational, &RunResult, &P) -> Result<()>,
{
    let mut prefix: Vec<bool> = Vec::new();
    let mut branches = 0u64;
    loop {
        let mut coins = ScriptedCoins::new(prefix.clone());
        let run = simulate_with_coins(inst, policy, &mut coins)?;
        let drawn = coins.drawn().to_vec();
        branches += 1;
        if branches > BRANCH_CAP || drawn.len() > 63 {
            return Err(Error::BranchingCap(BRANCH_CAP));
        }
        f(&Rational::pow2_inv(drawn.len()), &run, policy)?;
        match drawn.iter().rposition(|b| !b) {
            None => return Ok(branches),
            Some(k) => {
                prefix = drawn[..k].to_vec();
                prefix.push(true);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub value: Rational,
    pub branches: u64,
}

/// Exact expected reward over the policy's coin flips.
pub fn exact_expectation<P: OnlinePolicy + ?Sized>(
    inst: &OnlineInstance,
    policy: &mut P,
) -> Result<Expectation> {
    let mut value = Rational::zero();
    let branches = for_each_branch(inst, policy, |p, run, _| {
        value += p * &run.collected;
        Ok(())
    })?;
    Ok(Expectation { value, branches })
}
