//! Canonical topologies used by the walkthrough experiments.

use crate::topology::{Link, SiteId, Topology};

/// Labels of the nine-site walkthrough network; label `i` is site `i`.
pub const FIG3_LABELS: [char; 9] = ['A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I'];

/// Edge list of the walkthrough network. Unit weights; the only A to G
/// route is A, C, B, G and E, H, I hang off G.
pub const FIG3_EDGES: [(char, char); 8] = [
    ('A', 'C'),
    ('C', 'B'),
    ('B', 'G'),
    ('G', 'H'),
    ('G', 'I'),
    ('G', 'E'),
    ('A', 'D'),
    ('D', 'F'),
];

pub fn fig3_site(label: char) -> SiteId {
    let idx = FIG3_LABELS
        .iter()
        .position(|&l| l == label)
        .unwrap_or_else(|| panic!("no site labelled {label}"));
    SiteId(idx)
}

pub fn fig3_label(site: SiteId) -> char {
    FIG3_LABELS[site.0]
}

pub fn fig3_links() -> Vec<Link<f64>> {
    FIG3_EDGES
        .iter()
        .map(|&(a, b)| Link::new(fig3_site(a).0, fig3_site(b).0, 1.0))
        .collect()
}

pub fn fig3() -> Topology<f64> {
    Topology::build(FIG3_LABELS.len(), fig3_links()).expect("walkthrough network is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn route_a_to_g() {
        let t = fig3();
        let a = fig3_site('A');
        let g = fig3_site('G');
        assert_eq!(t.next_hop(a, g).unwrap(), fig3_site('C'));
        assert_eq!(*t.distance(a, g), 3.0);
        let labels: String = t.route(a, g).into_iter().map(fig3_label).collect();
        assert_eq!(labels, "ACBG");
    }

    #[test]
    fn leaves_hang_off_g() {
        let t = fig3();
        for leaf in ['E', 'H', 'I'] {
            let route: String = t
                .route(fig3_site('A'), fig3_site(leaf))
                .into_iter()
                .map(fig3_label)
                .collect();
            assert_eq!(route, format!("ACBG{leaf}"));
        }
    }
}
