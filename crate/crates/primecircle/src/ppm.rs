//! Binary PPM (P6) canvas over a square viewport of the complex plane.

use primecircle_core::SpherePoint;

pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];
pub const RED: Rgb = [255, 0, 0];
pub const BLUE: Rgb = [0, 0, 255];

/// Pixel `(0, 0)` is the top-left corner `-extent + extent i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Canvas {
    width: usize,
    height: usize,
    extent: f64,
    pixels: Vec<Rgb>,
}

impl Canvas {
    /// `None` when a dimension is zero or the extent is not positive.
    pub fn new(width: usize, height: usize, extent: f64) -> Option<Canvas> {
        if width == 0 || height == 0 || !(extent > 0.0 && extent.is_finite()) {
            return None;
        }
        Some(Canvas {
            width,
            height,
            extent,
            pixels: vec![WHITE; width * height],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Pixel containing `p`, if it lies in the viewport.
    pub fn pixel_of(&self, p: &SpherePoint) -> Option<(usize, usize)> {
        let z = p.to_complex()?;
        let span = 2.0 * self.extent;
        let x = (z.re + self.extent) / span * self.width as f64;
        let y = (self.extent - z.im) / span * self.height as f64;
        if !(0.0..self.width as f64).contains(&x) || !(0.0..self.height as f64).contains(&y) {
            return None;
        }
        Some((x as usize, y as usize))
    }

    /// Centre of pixel `(col, row)` in the plane.
    pub fn point_of(&self, col: usize, row: usize) -> (f64, f64) {
        let span = 2.0 * self.extent;
        (
            -self.extent + (col as f64 + 0.5) / self.width as f64 * span,
            self.extent - (row as f64 + 0.5) / self.height as f64 * span,
        )
    }

    pub fn get(&self, col: usize, row: usize) -> Rgb {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, color: Rgb) {
        self.pixels[row * self.width + col] = color;
    }

    /// Paints `p` if visible; returns whether it was.
    pub fn plot(&mut self, p: &SpherePoint, color: Rgb) -> bool {
        match self.pixel_of(p) {
            Some((col, row)) => {
                self.set(col, row, color);
                true
            }
            None => false,
        }
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let header = format!("P6\n{} {}\n255\n", self.width, self.height);
        let mut out = Vec::with_capacity(header.len() + 3 * self.pixels.len());
        out.extend_from_slice(header.as_bytes());
        for px in &self.pixels {
            out.extend_from_slice(px);
        }
        out
    }
}

/// Parsed P6 image; used to inspect rendered output.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

pub fn parse_ppm(bytes: &[u8]) -> Option<Image> {
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while bytes.get(pos)?.is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while !bytes.get(pos)?.is_ascii_whitespace() {
            pos += 1;
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?);
    }
    pos += 1;
    if fields[0] != "P6" || fields[3] != "255" {
        return None;
    }
    let width: usize = fields[1].parse().ok()?;
    let height: usize = fields[2].parse().ok()?;
    let body = bytes.get(pos..)?;
    if body.len() != 3 * width * height {
        return None;
    }
    let pixels = body.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    Some(Image { width, height, pixels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use primecircle_core::Complex64;

    #[test]
    fn header_and_size() {
        let c = Canvas::new(4, 3, 1.0).unwrap();
        let bytes = c.to_ppm();
        assert!(bytes.starts_with(b"P6\n4 3\n255\n"));
        assert_eq!(bytes.len(), 11 + 36);
        assert!(bytes[11..].iter().all(|b| *b == 255));
        assert!(Canvas::new(0, 3, 1.0).is_none());
        assert!(Canvas::new(3, 3, 0.0).is_none());
    }

    #[test]
    fn orientation() {
        let mut c = Canvas::new(10, 10, 1.0).unwrap();
        assert!(c.plot(&SpherePoint::finite(Complex64::new(-0.95, 0.95)), RED));
        assert_eq!(c.get(0, 0), RED);
        assert!(c.plot(&SpherePoint::finite(Complex64::new(0.95, -0.95)), BLUE));
        assert_eq!(c.get(9, 9), BLUE);
        assert!(!c.plot(&SpherePoint::finite(Complex64::new(1.5, 0.0)), RED));
        assert!(!c.plot(&SpherePoint::INFINITY, RED));
        let (x, y) = c.point_of(0, 0);
        assert!((x + 0.9).abs() < 1e-12 && (y - 0.9).abs() < 1e-12);
    }

    #[test]
    fn parse_round_trip() {
        let mut c = Canvas::new(5, 2, 1.0).unwrap();
        c.set(4, 1, [1, 2, 3]);
        let img = parse_ppm(&c.to_ppm()).unwrap();
        assert_eq!((img.width, img.height), (5, 2));
        assert_eq!(img.pixels[9], [1, 2, 3]);
        assert!(parse_ppm(b"P5\n1 1\n255\n\0").is_none());
    }
}
