//! Compile a frozen column into a gate-level netlist.
//!
//! One clock cycle is one encoding tick, which makes the netlist match the
//! behavioral simulator cycle-for-cycle, not approximately:
//!
//! * each synapse is a down-counter loaded with the weight's integer ramp by
//!   the input line's pulse, asserting 1 while nonzero (ramp model), or a
//!   seen-latch weighting a constant (step model);
//! * each neuron sums its active synapses through a popcount adder tree into
//!   an accumulator register and compares against theta;
//! * a first-spike latch turns the threshold crossing into a single pulse;
//! * a priority-encoder WTA with a global done-latch pulses the winner's
//!   output line exactly once;
//! * a saturating tick counter gates firing to the column's horizon, so
//!   configurations with a horizon shorter than window + w_max still agree
//!   with the simulator exactly.
//!
//! Constant weight bits and thresholds are folded into the logic at build
//! time, so the emitted netlist contains no constant nets.

use crate::error::HwError;
use crate::netlist::{Gate, NetId, Netlist, NetlistMeta};
use tnn::column::{ColumnState, NeuronModel};

/// Default cap on `p * q` for emission; estimation has no such cap.
pub const DEFAULT_EMIT_CAP: usize = 4096;

/// A signal during construction: a real net or a constant folded away.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sig {
    Const(bool),
    Net(NetId),
}

use Sig::Const;

struct Builder {
    net_names: Vec<String>,
    gates: Vec<Gate>,
    zero: Option<NetId>,
    first_input: NetId,
}

impl Builder {
    fn new() -> Builder {
        Builder {
            net_names: Vec::new(),
            gates: Vec::new(),
            zero: None,
            first_input: 0,
        }
    }

    fn net(&mut self, name: String) -> NetId {
        self.net_names.push(name);
        self.net_names.len() - 1
    }

    fn fresh(&mut self) -> NetId {
        let id = self.net_names.len();
        self.net(format!("n{id}"))
    }

    fn not(&mut self, a: Sig) -> Sig {
        match a {
            Const(b) => Const(!b),
            Sig::Net(a) => {
                let y = self.fresh();
                self.gates.push(Gate::Not { a, y });
                Sig::Net(y)
            }
        }
    }

    fn and2(&mut self, a: Sig, b: Sig) -> Sig {
        match (a, b) {
            (Const(false), _) | (_, Const(false)) => Const(false),
            (Const(true), x) | (x, Const(true)) => x,
            (Sig::Net(a), Sig::Net(b)) if a == b => Sig::Net(a),
            (Sig::Net(a), Sig::Net(b)) => {
                let y = self.fresh();
                self.gates.push(Gate::And2 { a, b, y });
                Sig::Net(y)
            }
        }
    }

    fn or2(&mut self, a: Sig, b: Sig) -> Sig {
        match (a, b) {
            (Const(true), _) | (_, Const(true)) => Const(true),
            (Const(false), x) | (x, Const(false)) => x,
            (Sig::Net(a), Sig::Net(b)) if a == b => Sig::Net(a),
            (Sig::Net(a), Sig::Net(b)) => {
                let y = self.fresh();
                self.gates.push(Gate::Or2 { a, b, y });
                Sig::Net(y)
            }
        }
    }

    fn xor2(&mut self, a: Sig, b: Sig) -> Sig {
        match (a, b) {
            (Const(false), x) | (x, Const(false)) => x,
            (Const(true), x) | (x, Const(true)) => self.not(x),
            (Sig::Net(a), Sig::Net(b)) if a == b => Const(false),
            (Sig::Net(a), Sig::Net(b)) => {
                let y = self.fresh();
                self.gates.push(Gate::Xor2 { a, b, y });
                Sig::Net(y)
            }
        }
    }

    /// y = if s { b } else { a }
    fn mux2(&mut self, s: Sig, a: Sig, b: Sig) -> Sig {
        match (s, a, b) {
            (Const(true), _, b) => b,
            (Const(false), a, _) => a,
            (_, a, b) if a == b => a,
            (s, Const(false), b) => self.and2(s, b),
            (s, Const(true), b) => {
                let ns = self.not(s);
                self.or2(ns, b)
            }
            (s, a, Const(false)) => {
                let ns = self.not(s);
                self.and2(ns, a)
            }
            (s, a, Const(true)) => self.or2(s, a),
            (Sig::Net(s), Sig::Net(a), Sig::Net(b)) => {
                let y = self.fresh();
                self.gates.push(Gate::Mux2 { s, a, b, y });
                Sig::Net(y)
            }
        }
    }

    /// A constant-zero net, built on demand from the first input line.
    fn zero_net(&mut self) -> NetId {
        if let Some(z) = self.zero {
            return z;
        }
        let a = self.first_input;
        let na = self.fresh();
        self.gates.push(Gate::Not { a, y: na });
        let z = self.fresh();
        self.gates.push(Gate::And2 { a, b: na, y: z });
        self.zero = Some(z);
        z
    }

    fn materialize(&mut self, s: Sig) -> NetId {
        match s {
            Sig::Net(n) => n,
            Const(false) => self.zero_net(),
            Const(true) => {
                let z = self.zero_net();
                let y = self.fresh();
                self.gates.push(Gate::Not { a: z, y });
                y
            }
        }
    }

    /// Create a register's output net now; its input is attached later.
    fn reg(&mut self, name: String) -> NetId {
        self.net(name)
    }

    fn reg_drive(&mut self, q: NetId, d: Sig) {
        let d = self.materialize(d);
        self.gates.push(Gate::Dff { d, q });
    }

    /// Drive an existing (port) net with the AND of two signals.
    fn and2_to(&mut self, target: NetId, a: Sig, b: Sig) {
        match self.and2(a, b) {
            Sig::Net(n) => {
                // The folded result may be a pre-existing net; retarget the
                // gate we just created when possible, otherwise buffer.
                if let Some(last) = self.gates.last_mut() {
                    if last.output() == n && n + 1 == self.net_names.len() {
                        match last {
                            Gate::And2 { y, .. } => {
                                *y = target;
                                self.net_names.pop();
                                return;
                            }
                            _ => {}
                        }
                    }
                }
                self.gates.push(Gate::Or2 { a: n, b: n, y: target });
            }
            Const(false) => {
                let z = self.zero_net();
                self.gates.push(Gate::Or2 { a: z, b: z, y: target });
            }
            Const(true) => {
                let z = self.zero_net();
                self.gates.push(Gate::Not { a: z, y: target });
            }
        }
    }

    fn or_tree(&mut self, bits: &[Sig]) -> Sig {
        match bits.len() {
            0 => Const(false),
            1 => bits[0],
            n => {
                let left = self.or_tree(&bits[..n / 2]);
                let right = self.or_tree(&bits[n / 2..]);
                self.or2(left, right)
            }
        }
    }

    fn and_tree(&mut self, bits: &[Sig]) -> Sig {
        match bits.len() {
            0 => Const(true),
            1 => bits[0],
            n => {
                let left = self.and_tree(&bits[..n / 2]);
                let right = self.and_tree(&bits[n / 2..]);
                self.and2(left, right)
            }
        }
    }

    /// Ripple-carry sum of two little-endian words, carry bit appended.
    fn add_words(&mut self, a: &[Sig], b: &[Sig]) -> Vec<Sig> {
        let width = a.len().max(b.len());
        let mut out = Vec::with_capacity(width + 1);
        let mut carry = Const(false);
        for k in 0..width {
            let ak = a.get(k).copied().unwrap_or(Const(false));
            let bk = b.get(k).copied().unwrap_or(Const(false));
            let axb = self.xor2(ak, bk);
            let sum = self.xor2(axb, carry);
            let ab = self.and2(ak, bk);
            let cab = self.and2(carry, axb);
            carry = self.or2(ab, cab);
            out.push(sum);
        }
        out.push(carry);
        out
    }

    /// Population count of single-bit signals as a little-endian word.
    fn popcount(&mut self, bits: &[Sig]) -> Vec<Sig> {
        match bits.len() {
            0 => vec![Const(false)],
            1 => vec![bits[0]],
            n => {
                let left = self.popcount(&bits[..n / 2]);
                let right = self.popcount(&bits[n / 2..]);
                self.add_words(&left, &right)
            }
        }
    }

    /// word - 1 with a borrow ripple; callers gate the result so the wrap at
    /// zero never becomes visible.
    fn decrement(&mut self, word: &[Sig]) -> Vec<Sig> {
        let mut out = Vec::with_capacity(word.len());
        let mut borrow = Const(true);
        for &bit in word {
            out.push(self.xor2(bit, borrow));
            let nb = self.not(bit);
            borrow = self.and2(borrow, nb);
        }
        out
    }

    /// word + 1 with a carry ripple.
    fn increment(&mut self, word: &[Sig]) -> Vec<Sig> {
        let mut out = Vec::with_capacity(word.len());
        let mut carry = Const(true);
        for &bit in word {
            out.push(self.xor2(bit, carry));
            carry = self.and2(carry, bit);
        }
        out
    }

    /// word >= k, with the constant folded into a borrow chain.
    fn ge_const(&mut self, word: &[Sig], k: u64) -> Sig {
        assert!(
            (k as u128) < (1u128 << word.len()),
            "comparison constant {k} does not fit in {} bits",
            word.len()
        );
        let mut borrow = Const(false);
        for (bit, &p) in word.iter().enumerate() {
            let kb = (k >> bit) & 1 == 1;
            let np = self.not(p);
            borrow = if kb {
                let hold = self.and2(borrow, p);
                self.or2(np, hold)
            } else {
                self.and2(borrow, np)
            };
        }
        self.not(borrow)
    }
}

fn bits_for(x: u64) -> usize {
    if x == 0 {
        1
    } else {
        (64 - x.leading_zeros()) as usize
    }
}

/// Emit with the default synapse cap.
pub fn emit_netlist(state: &ColumnState) -> Result<Netlist, HwError> {
    emit_netlist_with_cap(state, DEFAULT_EMIT_CAP)
}

/// Compile `state` into a netlist; fails when `p * q` exceeds `cap`.
pub fn emit_netlist_with_cap(state: &ColumnState, cap: usize) -> Result<Netlist, HwError> {
    let cfg = &state.config;
    cfg.validate()?;
    let synapses = cfg.p * cfg.q;
    if synapses > cap {
        return Err(HwError::EmissionCapExceeded { synapses, cap });
    }

    let mut b = Builder::new();
    let clock = b.net("clk".into());
    let reset = b.net("rst".into());
    let inputs: Vec<NetId> = (0..cfg.p).map(|i| b.net(format!("in_{i}"))).collect();
    let outputs: Vec<NetId> = (0..cfg.q).map(|j| b.net(format!("out_{j}"))).collect();
    b.first_input = inputs[0];

    let rst = Sig::Net(reset);
    let not_rst = b.not(rst);

    // Horizon timer: a saturating tick counter; firing is enabled only while
    // count < horizon, matching the simulator's scan bound exactly.
    let tbits = bits_for(u64::from(cfg.horizon));
    let timer: Vec<NetId> = (0..tbits).map(|k| b.reg(format!("tmr{k}"))).collect();
    let timer_word: Vec<Sig> = timer.iter().map(|&n| Sig::Net(n)).collect();
    let inc = b.increment(&timer_word);
    let is_max = b.and_tree(&timer_word);
    for k in 0..tbits {
        let next = b.mux2(is_max, inc[k], timer_word[k]);
        let d = b.and2(next, not_rst);
        b.reg_drive(timer[k], d);
    }
    let past = b.ge_const(&timer_word, u64::from(cfg.horizon));
    let live = b.not(past);

    // Shared inverted input pulses (used by counter load logic).
    let in_sigs: Vec<Sig> = inputs.iter().map(|&n| Sig::Net(n)).collect();
    let not_in: Vec<Sig> = in_sigs.iter().map(|&s| b.not(s)).collect();

    let ramps: Vec<u32> = (0..cfg.p)
        .flat_map(|i| {
            let w = &state.weights;
            (0..cfg.q).map(move |j| w.get(i, j).ramp()).collect::<Vec<_>>()
        })
        .collect();

    let max_potential = (cfg.p as u64) * u64::from(cfg.w_max);
    let pot_bits = bits_for(max_potential.max(u64::from(cfg.theta)));
    let wbits = bits_for(u64::from(cfg.w_max));

    let mut fire_pulses: Vec<Sig> = Vec::with_capacity(cfg.q);
    for j in 0..cfg.q {
        let potential: Vec<Sig> = match cfg.model {
            NeuronModel::RampNoLeak => {
                // Synapse down-counters; active while nonzero. The counter
                // loads on the input pulse and decrements to zero, so the
                // active window is exactly ticks x+1 ..= x+ramp.
                let mut active_bits = Vec::with_capacity(cfg.p);
                for i in 0..cfg.p {
                    let r = ramps[i * cfg.q + j];
                    let cnt: Vec<NetId> =
                        (0..wbits).map(|k| b.reg(format!("s{i}_{j}c{k}"))).collect();
                    let cnt_word: Vec<Sig> = cnt.iter().map(|&n| Sig::Net(n)).collect();
                    let active = b.or_tree(&cnt_word);
                    let dec = b.decrement(&cnt_word);
                    for k in 0..wbits {
                        let held = b.mux2(active, cnt_word[k], dec[k]);
                        let next = if (r >> k) & 1 == 1 {
                            b.or2(in_sigs[i], held)
                        } else {
                            b.and2(not_in[i], held)
                        };
                        let d = b.and2(next, not_rst);
                        b.reg_drive(cnt[k], d);
                    }
                    active_bits.push(active);
                }
                // Accumulator integrates the popcount of active synapses;
                // the adder output is this cycle's potential and also the
                // accumulator's next value.
                let acc: Vec<NetId> = (0..pot_bits).map(|k| b.reg(format!("a{j}_{k}"))).collect();
                let acc_word: Vec<Sig> = acc.iter().map(|&n| Sig::Net(n)).collect();
                let pc = b.popcount(&active_bits);
                let pot = b.add_words(&acc_word, &pc);
                for k in 0..pot_bits {
                    let d = b.and2(pot[k], not_rst);
                    b.reg_drive(acc[k], d);
                }
                pot
            }
            NeuronModel::StepNoLeak => {
                // Seen-latches; a spike contributes its whole ramp from its
                // own cycle onward, so the potential is a weighted sum of
                // (seen | pulse) bits with the ramps folded in as constants.
                let mut words: Vec<Vec<Sig>> = Vec::with_capacity(cfg.p);
                for i in 0..cfg.p {
                    let r = ramps[i * cfg.q + j];
                    let seen = b.reg(format!("s{i}_{j}seen"));
                    let seen_sig = Sig::Net(seen);
                    let active_now = b.or2(seen_sig, in_sigs[i]);
                    let d = b.and2(active_now, not_rst);
                    b.reg_drive(seen, d);
                    let word: Vec<Sig> = (0..wbits)
                        .map(|k| {
                            if (r >> k) & 1 == 1 {
                                active_now
                            } else {
                                Const(false)
                            }
                        })
                        .collect();
                    words.push(word);
                }
                let mut sum: Vec<Sig> = vec![Const(false)];
                while words.len() > 1 {
                    let mut next = Vec::with_capacity(words.len() / 2 + 1);
                    let mut iter = words.chunks(2);
                    for chunk in &mut iter {
                        match chunk {
                            [a, b_] => next.push(b.add_words(a, b_)),
                            [a] => next.push(a.clone()),
                            _ => unreachable!(),
                        }
                    }
                    words = next;
                }
                if let Some(w) = words.pop() {
                    sum = w;
                }
                // Pad so theta always fits the comparison width.
                while sum.len() < pot_bits {
                    sum.push(Const(false));
                }
                sum
            }
        };

        let ge = b.ge_const(&potential, u64::from(cfg.theta));
        let ge_live = b.and2(ge, live);
        // First-spike latch: one pulse at the crossing cycle, then silence.
        let fired = b.reg(format!("f{j}"));
        let fired_sig = Sig::Net(fired);
        let fired_next = b.or2(fired_sig, ge_live);
        let d = b.and2(fired_next, not_rst);
        b.reg_drive(fired, d);
        let not_fired = b.not(fired_sig);
        fire_pulses.push(b.and2(ge_live, not_fired));
    }

    // Priority-encoder WTA with a global one-shot: the lowest-index neuron
    // firing at the earliest crossing cycle pulses once; everything later is
    // masked by the done latch.
    let done = b.reg("done".into());
    let done_sig = Sig::Net(done);
    let not_done = b.not(done_sig);
    let mut prior = Const(false);
    let mut prios = Vec::with_capacity(cfg.q);
    for &fp in &fire_pulses {
        let not_prior = b.not(prior);
        prios.push(b.and2(fp, not_prior));
        prior = b.or2(prior, fp);
    }
    let done_next = b.or2(done_sig, prior);
    let d = b.and2(done_next, not_rst);
    b.reg_drive(done, d);
    for (j, &prio) in prios.iter().enumerate() {
        b.and2_to(outputs[j], prio, not_done);
    }

    let netlist = Netlist {
        name: format!("tnn_col_p{}q{}", cfg.p, cfg.q),
        clock,
        reset,
        inputs,
        outputs,
        net_names: b.net_names,
        gates: b.gates,
        meta: NetlistMeta {
            p: cfg.p,
            q: cfg.q,
            theta: cfg.theta,
            window: cfg.window,
            horizon: cfg.horizon,
            w_max: cfg.w_max,
            model: cfg.model,
            ramps,
        },
    };
    debug_assert!(netlist.lint().is_ok());
    Ok(netlist)
}
