//! Connected-component cleanup for label grids.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use crate::types::SuperpixelGrid;

const NEIGHBORS: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];

fn neighbors(idx: usize, height: usize, width: usize) -> impl Iterator<Item = usize> {
    let (r, c) = ((idx / width) as isize, (idx % width) as isize);
    NEIGHBORS.iter().filter_map(move |&(dr, dc)| {
        let (nr, nc) = (r + dr, c + dc);
        (nr >= 0 && nc >= 0 && (nr as usize) < height && (nc as usize) < width)
            .then(|| nr as usize * width + nc as usize)
    })
}

/// Labels the 4-connected components of `labels`, numbering them in raster
/// order of their first pixel. Returns per-pixel component ids and the count.
pub fn connected_components(height: usize, width: usize, labels: &[u32]) -> (Vec<u32>, usize) {
    let mut comp = vec![u32::MAX; labels.len()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..labels.len() {
        if comp[start] != u32::MAX {
            continue;
        }
        comp[start] = next;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            for q in neighbors(p, height, width) {
                if comp[q] == u32::MAX && labels[q] == labels[start] {
                    comp[q] = next;
                    queue.push_back(q);
                }
            }
        }
        next += 1;
    }
    (comp, next as usize)
}

/// Splits every label into its 4-connected components and merges components
/// smaller than `min_size` into the neighbour sharing the longest border.
/// Output labels are numbered by raster order of first appearance.
pub fn enforce_connectivity(grid: &SuperpixelGrid, min_size: usize) -> SuperpixelGrid {
    merge_components(grid, min_size, 1, usize::MAX)
}

/// [`enforce_connectivity`] with bounds on the resulting label count.
///
/// Small components are absorbed smallest first, and absorption stops once
/// only `floor` components remain. If more than `ceiling` remain afterwards,
/// the smallest are merged regardless of size until `ceiling` is met. Each
/// merge goes to the neighbour with the longest shared border; ties go to the
/// smaller neighbour, then to the one whose first pixel comes first in raster
/// order.
pub fn merge_components(
    grid: &SuperpixelGrid,
    min_size: usize,
    floor: usize,
    ceiling: usize,
) -> SuperpixelGrid {
    let (height, width) = grid.shape();
    let (comp, n) = connected_components(height, width, grid.labels());

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (p, &c) in comp.iter().enumerate() {
        members[c as usize].push(p);
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    let mut count = n;
    for phase_min in [min_size, usize::MAX] {
        let stop = if phase_min == usize::MAX {
            ceiling
        } else {
            floor.max(1)
        };
        // Min-heap of (size, id); entries go stale when a component grows or is absorbed.
        let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..n)
            .filter(|&id| find(&mut parent, id) == id)
            .map(|id| Reverse((members[id].len(), id)))
            .collect();
        while count > stop {
            let Some(Reverse((size, id))) = heap.pop() else {
                break;
            };
            if find(&mut parent, id) != id || members[id].len() != size {
                continue;
            }
            if size >= phase_min {
                break;
            }
            let mut border: BTreeMap<usize, usize> = BTreeMap::new();
            for &p in &members[id] {
                for q in neighbors(p, height, width) {
                    let other = find(&mut parent, comp[q] as usize);
                    if other != id {
                        *border.entry(other).or_default() += 1;
                    }
                }
            }
            // Longest border, then smallest neighbour, then lowest id.
            let Some((&target, _)) = border
                .iter()
                .min_by_key(|&(&other, &len)| (Reverse(len), members[other].len(), other))
            else {
                continue;
            };
            parent[id] = target;
            let moved = std::mem::take(&mut members[id]);
            members[target].extend(moved);
            heap.push(Reverse((members[target].len(), target)));
            count -= 1;
        }
        if count <= ceiling {
            break;
        }
    }

    let mut relabel = vec![u32::MAX; n];
    let mut next = 0u32;
    let labels = comp
        .iter()
        .map(|&c| {
            let root = find(&mut parent, c as usize);
            if relabel[root] == u32::MAX {
                relabel[root] = next;
                next += 1;
            }
            relabel[root]
        })
        .collect();
    SuperpixelGrid::new(height, width, next as usize, labels)
        .expect("relabelled components cover every id")
}

/// True when every label's pixel set is a single 4-connected component.
pub fn is_four_connected(grid: &SuperpixelGrid) -> bool {
    let (_, n) = connected_components(grid.height(), grid.width(), grid.labels());
    n == grid.num_labels()
}
