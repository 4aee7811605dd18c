use alloc::vec;
use alloc::vec::Vec;

/// Indexed max-heap of variables ordered by activity, ties broken towards the
/// lower variable index.
#[derive(Clone, Debug, Default)]
pub(crate) struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    pub fn new(n: usize) -> Self {
        VarHeap { heap: Vec::with_capacity(n), pos: vec![None; n] }
    }

    pub fn grow(&mut self, n: usize) {
        if self.pos.len() < n {
            self.pos.resize(n, None);
        }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.pos[v as usize].is_some()
    }

    fn before(act: &[f64], a: u32, b: u32) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    pub fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = Some(i);
        self.sift_up(i, act);
    }

    /// Restores order after `v`'s activity increased.
    pub fn increased(&mut self, v: u32, act: &[f64]) {
        if let Some(i) = self.pos[v as usize] {
            self.sift_up(i, act);
        }
    }

    pub fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("nonempty");
        self.pos[top as usize] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = Some(0);
            self.sift_down(0, act);
        }
        Some(top)
    }

    /// Rebuilds the heap after a global activity rescale or bulk change.
    pub fn rebuild(&mut self, act: &[f64]) {
        let vars = core::mem::take(&mut self.heap);
        for v in &vars {
            self.pos[*v as usize] = None;
        }
        for v in vars {
            self.insert(v, act);
        }
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if !Self::before(act, v, p) {
                break;
            }
            self.heap[i] = p;
            self.pos[p as usize] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && Self::before(act, self.heap[r], self.heap[l]) { r } else { l };
            let c = self.heap[child];
            if !Self::before(act, c, v) {
                break;
            }
            self.heap[i] = c;
            self.pos[c as usize] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }
}
