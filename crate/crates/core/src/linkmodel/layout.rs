use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which end of a link touches a vertex. The L end sits at the link's
/// starting vertex, the R end at its terminating vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum End {
    L,
    R,
}

/// An oriented link encoded by a position qubit and a spin qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub id: u32,
    pub from: u32,
    pub to: u32,
    pub position: usize,
    pub spin: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: u32,
    /// Incident links with the end that touches this vertex.
    pub incident: Vec<(u32, End)>,
}

/// Vertices, oriented links and the triangular plaquettes built from them.
///
/// Text format (one item per line, `#` starts a comment):
///
/// ```text
/// vertex <id>
/// link <id> <from-vertex> <to-vertex> <position-qubit> <spin-qubit>
/// plaquette <link-id> <link-id> <link-id>
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaquetteLayout {
    links: Vec<Link>,
    vertices: Vec<Vertex>,
    plaquettes: Vec<[u32; 3]>,
}

impl PlaquetteLayout {
    pub fn new(vertex_ids: &[u32], links: Vec<Link>, plaquettes: Vec<[u32; 3]>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &v in vertex_ids {
            if !seen.insert(v) {
                return Err(Error::InvalidLayout(format!("duplicate vertex {v}")));
            }
        }
        let mut ids = BTreeSet::new();
        let mut qubits = BTreeSet::new();
        for l in &links {
            if !ids.insert(l.id) {
                return Err(Error::InvalidLayout(format!("duplicate link {}", l.id)));
            }
            for v in [l.from, l.to] {
                if !seen.contains(&v) {
                    return Err(Error::UnknownVertex(v));
                }
            }
            if l.from == l.to {
                return Err(Error::InvalidLayout(format!("link {} is a self-loop", l.id)));
            }
            for q in [l.position, l.spin] {
                if !qubits.insert(q) {
                    return Err(Error::InvalidLayout(format!("qubit {q} assigned twice")));
                }
            }
        }
        let vertices = vertex_ids
            .iter()
            .map(|&id| {
                let mut incident = Vec::new();
                for l in &links {
                    if l.from == id {
                        incident.push((l.id, End::L));
                    }
                    if l.to == id {
                        incident.push((l.id, End::R));
                    }
                }
                Vertex { id, incident }
            })
            .collect();
        let layout = PlaquetteLayout { links, vertices, plaquettes };
        for p in &layout.plaquettes {
            layout.check_closed(p)?;
        }
        Ok(layout)
    }

    /// The single triangle: links 1->2, 2->3, 3->1 on qubits (0,1), (2,3), (4,5).
    pub fn triangle() -> Self {
        let link = |id, from, to, position, spin| Link { id, from, to, position, spin };
        PlaquetteLayout::new(
            &[1, 2, 3],
            vec![link(12, 1, 2, 0, 1), link(23, 2, 3, 2, 3), link(31, 3, 1, 4, 5)],
            vec![[12, 23, 31]],
        )
        .expect("triangle layout is valid")
    }

    fn check_closed(&self, plaquette: &[u32; 3]) -> Result<()> {
        let links = plaquette.iter().map(|&id| self.link(id)).collect::<Result<Vec<_>>>()?;
        for k in 0..3 {
            let (a, b) = (links[k], links[(k + 1) % 3]);
            if a.to != b.from {
                return Err(Error::OpenPlaquette(format!(
                    "link {} ends at vertex {} but link {} starts at vertex {}",
                    a.id, a.to, b.id, b.from
                )));
            }
        }
        Ok(())
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn plaquettes(&self) -> &[[u32; 3]] {
        &self.plaquettes
    }

    pub fn link(&self, id: u32) -> Result<&Link> {
        self.links.iter().find(|l| l.id == id).ok_or(Error::UnknownLink(id))
    }

    pub fn vertex(&self, id: u32) -> Result<&Vertex> {
        self.vertices.iter().find(|v| v.id == id).ok_or(Error::UnknownVertex(id))
    }

    pub fn n_qubits(&self) -> usize {
        self.links.iter().map(|l| l.position.max(l.spin) + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for PlaquetteLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            writeln!(f, "vertex {}", v.id)?;
        }
        for l in &self.links {
            writeln!(f, "link {} {} {} {} {}", l.id, l.from, l.to, l.position, l.spin)?;
        }
        for p in &self.plaquettes {
            writeln!(f, "plaquette {} {} {}", p[0], p[1], p[2])?;
        }
        Ok(())
    }
}

impl FromStr for PlaquetteLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut links = Vec::new();
        let mut plaquettes = Vec::new();
        for (k, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| Error::LayoutParse { line: k + 1, reason };
            let mut tok = line.split_whitespace();
            let kind = tok.next().unwrap();
            let fields: Vec<&str> = tok.collect();
            let nums = |n: usize| -> Result<Vec<u64>> {
                if fields.len() != n {
                    return Err(err(format!("{kind} expects {n} fields, found {}", fields.len())));
                }
                fields.iter().map(|f| f.parse::<u64>().map_err(|_| err(format!("not an integer: {f:?}")))).collect()
            };
            let as_u32 = |x: u64| u32::try_from(x).map_err(|_| err(format!("id out of range: {x}")));
            match kind {
                "vertex" => vertices.push(as_u32(nums(1)?[0])?),
                "link" => {
                    let v = nums(5)?;
                    links.push(Link {
                        id: as_u32(v[0])?,
                        from: as_u32(v[1])?,
                        to: as_u32(v[2])?,
                        position: v[3] as usize,
                        spin: v[4] as usize,
                    });
                }
                "plaquette" => {
                    let v = nums(3)?;
                    plaquettes.push([as_u32(v[0])?, as_u32(v[1])?, as_u32(v[2])?]);
                }
                other => return Err(err(format!("unknown record {other:?}"))),
            }
        }
        PlaquetteLayout::new(&vertices, links, plaquettes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_incidence() {
        let t = PlaquetteLayout::triangle();
        assert_eq!(t.n_qubits(), 6);
        assert_eq!(t.vertex(2).unwrap().incident, vec![(12, End::R), (23, End::L)]);
        assert_eq!(t.vertex(1).unwrap().incident, vec![(12, End::L), (31, End::R)]);
    }

    #[test]
    fn text_round_trip() {
        let t = PlaquetteLayout::triangle();
        let back: PlaquetteLayout = t.to_string().parse().unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_bad_layouts() {
        let open =
            "vertex 1\nvertex 2\nvertex 3\nlink 12 1 2 0 1\nlink 23 2 3 2 3\nlink 13 1 3 4 5\nplaquette 12 23 13\n";
        assert!(matches!(open.parse::<PlaquetteLayout>(), Err(Error::OpenPlaquette(_))));
        let shared = "vertex 1\nvertex 2\nlink 12 1 2 0 1\nlink 21 2 1 1 2\n";
        assert!(matches!(shared.parse::<PlaquetteLayout>(), Err(Error::InvalidLayout(_))));
        assert!(matches!("vertex x".parse::<PlaquetteLayout>(), Err(Error::LayoutParse { line: 1, .. })));
        assert!(matches!("link 1 1 2 0 1".parse::<PlaquetteLayout>(), Err(Error::UnknownVertex(1))));
        assert!(matches!("edge 1".parse::<PlaquetteLayout>(), Err(Error::LayoutParse { .. })));
    }
}
