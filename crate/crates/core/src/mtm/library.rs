//! Small hand-built machines used by examples, tests and the CLI
//! (`builtin:<name>`).

use super::machine::MachineSpec;

#[derive(Clone, Debug)]
pub struct NamedMachine {
    pub name: &'static str,
    pub machine: MachineSpec,
}

fn build(k: usize, start: &str, rules: &str) -> MachineSpec {
    MachineSpec::from_rules(k, start, rules).expect("library machine is well-formed")
}

/// Reads a bit, emits it, repeats.
pub fn copy() -> MachineSpec {
    build(2, "s", "s 0 ** -> s ** SS 0\ns 1 ** -> s ** SS 1\n")
}

/// Never reads; emits 0 every step.
pub fn constant_zero() -> MachineSpec {
    build(2, "s", "s _ ** -> s ** SS 0\n")
}

/// Never reads; emits 1 every step (single work tape).
pub fn constant_one() -> MachineSpec {
    build(1, "s", "s _ * -> s * S 1\n")
}

/// Emits 0101... without reading.
pub fn alternator() -> MachineSpec {
    build(2, "a", "a _ ** -> b ** SS 0\nb _ ** -> a ** SS 1\n")
}

/// Emits the complement of every input bit (single work tape).
pub fn inverter() -> MachineSpec {
    build(1, "s", "s 0 * -> s * S 1\ns 1 * -> s * S 0\n")
}

/// Emits every input bit twice.
pub fn doubler() -> MachineSpec {
    build(
        2,
        "s",
        "s 0 ** -> z ** SS 0
         s 1 ** -> o ** SS 1
         z _ ** -> s ** SS 0
         o _ ** -> s ** SS 1",
    )
}

/// Emits the running parity of the input.
pub fn parity() -> MachineSpec {
    build(
        2,
        "even",
        "even 0 ** -> even ** SS 0
         even 1 ** -> odd  ** SS 1
         odd  0 ** -> odd  ** SS 1
         odd  1 ** -> even ** SS 0",
    )
}

/// Swaps each consecutive pair of input bits, storing the first one on a work
/// tape and walking back to it.
pub fn reverse_pairs() -> MachineSpec {
    build(
        2,
        "a",
        "a 0 ** -> b 0* RS _
         a 1 ** -> b 1* RS _
         b 0 ** -> c ** LS 0
         b 1 ** -> c ** LS 1
         c _ 0* -> a 0* SS 0
         c _ 1* -> a 0* SS 1",
    )
}

/// Reads two bits, emits their conjunction and halts (single work tape).
pub fn and_halt() -> MachineSpec {
    build(
        1,
        "a",
        "a 0 * -> f * S _
         a 1 * -> t * S _
         f 0 * -> f * S 0 halt
         f 1 * -> f * S 0 halt
         t 0 * -> t * S 0 halt
         t 1 * -> t * S 1 halt",
    )
}

/// Reads blocks `1^n 0` and echoes each as `1^n 0`, counting on the second
/// work tape and erasing the count while walking back.
pub fn unary_echo() -> MachineSpec {
    build(
        2,
        "r",
        "r 1 ** -> r *1 SR _
         r 0 ** -> back ** SL _
         back _ *1 -> back *0 SL 1
         back _ *0 -> r *0 SR 0",
    )
}

/// Walks right forever without reading or emitting.
pub fn silent_loop() -> MachineSpec {
    build(2, "s", "s _ ** -> s ** RS _\n")
}

/// Every library machine, in a fixed order.
pub fn suite() -> Vec<NamedMachine> {
    vec![
        NamedMachine { name: "copy", machine: copy() },
        NamedMachine { name: "constant_zero", machine: constant_zero() },
        NamedMachine { name: "constant_one", machine: constant_one() },
        NamedMachine { name: "alternator", machine: alternator() },
        NamedMachine { name: "inverter", machine: inverter() },
        NamedMachine { name: "doubler", machine: doubler() },
        NamedMachine { name: "parity", machine: parity() },
        NamedMachine { name: "reverse_pairs", machine: reverse_pairs() },
        NamedMachine { name: "and_halt", machine: and_halt() },
        NamedMachine { name: "unary_echo", machine: unary_echo() },
        NamedMachine { name: "silent_loop", machine: silent_loop() },
    ]
}

pub fn by_name(name: &str) -> Option<MachineSpec> {
    suite().into_iter().find(|m| m.name == name).map(|m| m.machine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::mtm::exec::{run, RunStatus};

    fn out(m: &MachineSpec, input: &str, budget: usize) -> String {
        run(m, &bits(input), budget).output.to_string()
    }

    #[test]
    fn behaviours() {
        assert_eq!(out(&alternator(), "", 5), "01010");
        assert_eq!(out(&constant_one(), "", 3), "111");
        assert_eq!(out(&inverter(), "1011", 100), "0100");
        assert_eq!(out(&doubler(), "10", 100), "1100");
        assert_eq!(out(&parity(), "1101", 100), "1001");
        assert_eq!(out(&reverse_pairs(), "100111", 100), "011011");
        assert_eq!(out(&unary_echo(), "110010", 100), "110010");
        assert_eq!(out(&silent_loop(), "1", 50), "");
        let r = run(&and_halt(), &bits("11"), 100);
        assert_eq!((r.output.to_string(), r.status), ("1".to_string(), RunStatus::Halted));
    }

    #[test]
    fn names_are_unique() {
        let s = suite();
        for (i, a) in s.iter().enumerate() {
            assert!(s[i + 1..].iter().all(|b| b.name != a.name));
        }
        assert!(by_name("copy").is_some());
        assert!(by_name("nope").is_none());
    }
}
