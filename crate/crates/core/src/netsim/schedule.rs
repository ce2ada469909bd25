use std::collections::HashMap;

use serde::Serialize;

use super::deploy::Deployment;
use super::sinr::{all_feasible, Medium, Transmission, TransmissionSet};
use crate::error::{Error, Result};

/// Route of one source-destination flow: `path[0]` is the source, the last
/// entry the destination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flow {
    pub path: Vec<usize>,
}

impl Flow {
    pub fn direct(src: usize, dst: usize) -> Self {
        Self {
            path: vec![src, dst],
        }
    }

    pub fn source(&self) -> usize {
        self.path[0]
    }

    pub fn destination(&self) -> usize {
        *self.path.last().expect("flow path is never empty")
    }

    fn next_hop(&self, at: usize) -> Option<usize> {
        self.path.windows(2).find(|w| w[0] == at).map(|w| w[1])
    }
}

/// One direct flow per node, to its destination.
pub fn direct_flows(d: &Deployment) -> Vec<Flow> {
    d.dest
        .iter()
        .enumerate()
        .map(|(i, &j)| Flow::direct(i, j))
        .collect()
}

/// Greedy maximal feasible set over the direct links, longest first. Each
/// node takes part in at most one link. Transmit powers equalize the received
/// signal at `margin · β · N`.
pub fn greedy_feasible_set(
    d: &Deployment,
    medium: &Medium,
    beta: f64,
    band: usize,
    margin: f64,
) -> TransmissionSet {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| {
        d.link_length(b)
            .total_cmp(&d.link_length(a))
            .then(a.cmp(&b))
    });
    let noise = medium.bands[band].noise.max(f64::MIN_POSITIVE);
    let mut busy = vec![false; d.len()];
    let mut set = TransmissionSet::default();
    for tx in order {
        let rx = d.dest[tx];
        if busy[tx] || busy[rx] {
            continue;
        }
        let power = margin * beta * noise * medium.attenuation(band, d.link_length(tx));
        set.members.push(Transmission {
            tx,
            rx,
            band,
            power,
        });
        if all_feasible(&set, d, medium, beta) {
            busy[tx] = true;
            busy[rx] = true;
        } else {
            set.members.pop();
        }
    }
    set
}

/// The greedy set repeated in each of `slots` slots.
pub fn greedy_schedule(
    d: &Deployment,
    medium: &Medium,
    beta: f64,
    band: usize,
    slots: usize,
) -> Vec<TransmissionSet> {
    let set = greedy_feasible_set(d, medium, beta, band, 10.0);
    (0..slots)
        .map(|slot| TransmissionSet {
            members: set.members.clone(),
            slot,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportTally {
    /// Achieved λ·n·L̄, bit·km/s.
    pub transport: f64,
    pub bits_delivered: f64,
    pub hops: usize,
}

/// Replay a schedule and credit every delivered bit with its flow's
/// source-destination distance.
///
/// Each scheduled hop moves up to `rate · slot_seconds` bits of the first
/// flow routed over it that has bits waiting at the transmitter; sources are
/// always backlogged. Bits received in a slot can be forwarded from the next
/// slot on. Sets labelled at or beyond `slots` are ignored, so bits still in
/// flight at the horizon are not counted.
pub fn measure_transport(
    schedule: &[TransmissionSet],
    d: &Deployment,
    flows: &[Flow],
    rate: f64,
    slot_seconds: f64,
    slots: usize,
) -> Result<TransportTally> {
    if !(rate > 0.0 && slot_seconds > 0.0) || slots == 0 {
        return Err(Error::domain(
            "rate, slot length and slot count must be positive",
        ));
    }
    let per_hop = rate * slot_seconds;
    let mut queued: HashMap<(usize, usize), f64> = HashMap::new();
    let mut by_slot: Vec<&TransmissionSet> = schedule.iter().filter(|s| s.slot < slots).collect();
    by_slot.sort_by_key(|s| s.slot);

    let mut bit_km = 0.0;
    let mut bits_delivered = 0.0;
    let mut hops = 0;
    for set in by_slot {
        let mut arrivals: Vec<((usize, usize), f64)> = Vec::new();
        for m in &set.members {
            let carried = flows.iter().enumerate().find_map(|(fi, flow)| {
                if flow.next_hop(m.tx) != Some(m.rx) {
                    return None;
                }
                let available = if flow.source() == m.tx {
                    per_hop
                } else {
                    queued.get(&(m.tx, fi)).copied().unwrap_or(0.0).min(per_hop)
                };
                (available > 0.0).then_some((fi, available))
            });
            let Some((fi, bits)) = carried else { continue };
            hops += 1;
            let flow = &flows[fi];
            if flow.source() != m.tx {
                *queued.get_mut(&(m.tx, fi)).expect("queue checked above") -= bits;
            }
            if m.rx == flow.destination() {
                bits_delivered += bits;
                bit_km += bits * d.distance(flow.source(), flow.destination());
            } else {
                arrivals.push(((m.rx, fi), bits));
            }
        }
        for (key, bits) in arrivals {
            *queued.entry(key).or_insert(0.0) += bits;
        }
    }
    Ok(TransportTally {
        transport: bit_km / (slots as f64 * slot_seconds),
        bits_delivered,
        hops,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::deploy::{deploy, DeployMode, Point};

    fn line3() -> Deployment {
        Deployment::new(
            vec![
                Point { x: -0.4, y: 0.0 },
                Point { x: 0.0, y: 0.0 },
                Point { x: 0.4, y: 0.0 },
            ],
            vec![2, 2, 0],
        )
        .unwrap()
    }

    fn hop(tx: usize, rx: usize) -> Transmission {
        Transmission {
            tx,
            rx,
            band: 0,
            power: 1.0,
        }
    }

    #[test]
    fn one_link_one_slot() {
        let d = line3();
        let flows = vec![Flow::direct(0, 2)];
        let sched = vec![TransmissionSet {
            members: vec![hop(0, 2)],
            slot: 0,
        }];
        let t = measure_transport(&sched, &d, &flows, 5.0, 1.0, 1).unwrap();
        assert!((t.transport - 5.0 * 0.8).abs() < 1e-15);
    }

    #[test]
    fn relay_credits_end_to_end_distance() {
        // relay off the straight line so the hop lengths exceed |src − dst|
        let d = Deployment::new(
            vec![
                Point { x: -0.4, y: 0.0 },
                Point { x: 0.0, y: 0.3 },
                Point { x: 0.4, y: 0.0 },
            ],
            vec![2, 2, 0],
        )
        .unwrap();
        let flows = vec![Flow {
            path: vec![0, 1, 2],
        }];
        let sched = vec![
            TransmissionSet {
                members: vec![hop(0, 1)],
                slot: 0,
            },
            TransmissionSet {
                members: vec![hop(1, 2)],
                slot: 1,
            },
        ];
        let t = measure_transport(&sched, &d, &flows, 2.0, 1.0, 2).unwrap();
        assert_eq!(t.hops, 2);
        assert_eq!(t.bits_delivered, 2.0);
        assert!((t.transport - 2.0 * 0.8 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn bits_past_horizon_are_dropped() {
        let d = line3();
        let flows = vec![Flow {
            path: vec![0, 1, 2],
        }];
        let sched = vec![
            TransmissionSet {
                members: vec![hop(0, 1)],
                slot: 0,
            },
            TransmissionSet {
                members: vec![hop(1, 2)],
                slot: 1,
            },
        ];
        let t = measure_transport(&sched, &d, &flows, 2.0, 1.0, 1).unwrap();
        assert_eq!(t.bits_delivered, 0.0);
        assert_eq!(t.transport, 0.0);
    }

    #[test]
    fn relay_cannot_forward_before_receiving() {
        let d = line3();
        let flows = vec![Flow {
            path: vec![0, 1, 2],
        }];
        let sched = vec![TransmissionSet {
            members: vec![hop(1, 2), hop(0, 1)],
            slot: 0,
        }];
        let t = measure_transport(&sched, &d, &flows, 2.0, 1.0, 1).unwrap();
        assert_eq!(t.bits_delivered, 0.0);
        assert_eq!(t.hops, 1);
    }

    #[test]
    fn greedy_uses_each_node_once() {
        let d = deploy(40, DeployMode::UniformRandom, 11).unwrap();
        let m = Medium::narrowband(1.5, 10.0, 1.0).unwrap();
        let set = greedy_feasible_set(&d, &m, 2.0, 0, 10.0);
        assert!(!set.members.is_empty());
        assert!(set.members.len() <= d.len() / 2);
        let mut seen = vec![false; d.len()];
        for t in &set.members {
            assert!(!seen[t.tx] && !seen[t.rx]);
            seen[t.tx] = true;
            seen[t.rx] = true;
        }
        assert!(all_feasible(&set, &d, &m, 2.0));
    }
}
