use serde::{Deserialize, Serialize};

/// Axis-aligned planar box `[xmin, xmax] × [ymin, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Window {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Option<Window> {
        let w = Window { xmin, xmax, ymin, ymax };
        w.is_valid().then_some(w)
    }

    /// The square `[−h, h]²`.
    pub fn square(h: f64) -> Window {
        Window { xmin: -h, xmax: h, ymin: -h, ymax: h }
    }

    pub fn is_valid(&self) -> bool {
        [self.xmin, self.xmax, self.ymin, self.ymax].iter().all(|v| v.is_finite())
            && self.xmin < self.xmax
            && self.ymin < self.ymax
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.xmin && p[0] <= self.xmax && p[1] >= self.ymin && p[1] <= self.ymax
    }

    /// Cell sizes `(dx, dy)` of an `n × n` grid.
    pub fn cell(&self, n: usize) -> (f64, f64) {
        (self.width() / n as f64, self.height() / n as f64)
    }

    /// Center of grid cell `(i, j)`, `i` along x and `j` along y, both from the low corner.
    pub fn cell_center(&self, n: usize, i: usize, j: usize) -> [f64; 2] {
        let (dx, dy) = self.cell(n);
        [self.xmin + (i as f64 + 0.5) * dx, self.ymin + (j as f64 + 0.5) * dy]
    }
}

impl Default for Window {
    fn default() -> Self {
        Window::square(2.0)
    }
}
