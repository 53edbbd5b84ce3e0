#![allow(dead_code)]

use hyperhd::{Dataset, GrayImage, SeededRng};

/// `classes` classes of `width x height` images. Class `c` brightens one
/// cell of a grid over a dark background; every pixel carries a little
/// noise.
pub fn synthetic_dataset(classes: usize, per_class: usize, width: usize, height: usize, seed: u64) -> Dataset {
    let mut rng = SeededRng::new(seed);
    let mut images = Vec::new();
    let mut labels = Vec::new();
    for i in 0..classes * per_class {
        let class = i % classes;
        images.push(synthetic_image(class, classes, width, height, &mut rng));
        labels.push(class);
    }
    let names = (0..classes).map(|c| format!("class{c}")).collect();
    Dataset::new(images, labels, names).unwrap()
}

pub fn synthetic_image(class: usize, classes: usize, width: usize, height: usize, rng: &mut SeededRng) -> GrayImage {
    let cols = classes.div_ceil(2);
    let (cell_w, cell_h) = (width / cols, height / 2);
    let (cell_r, cell_c) = (class / cols, class % cols);
    let pixels = (0..width * height)
        .map(|i| {
            let (r, c) = (i / width, i % width);
            let inside = r / cell_h == cell_r && c / cell_w == cell_c;
            let noise = rng.below(4) as u8;
            if inside {
                200 + noise
            } else {
                20 + noise
            }
        })
        .collect();
    GrayImage::new(width, height, pixels).unwrap()
}

/// A model as read back from the exported C header text alone.
#[derive(Debug)]
pub struct HeaderModel {
    pub n: usize,
    pub d: usize,
    pub classes: usize,
    pub width: usize,
    pub height: usize,
    pub step: usize,
    pub proto_bytes: usize,
    pub count_sketch: bool,
    pub prototypes: Vec<u8>,
    pub indices: Vec<u32>,
    pub signs: Vec<i8>,
    pub flip_order: Vec<u32>,
    pub class_names: Vec<String>,
}

fn define(text: &str, name: &str) -> usize {
    let prefix = format!("#define {name} ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("missing {name}"))
        .trim()
        .parse()
        .unwrap()
}

fn array_body<'a>(text: &'a str, name: &str) -> &'a str {
    let start = text
        .find(&format!("{name}["))
        .unwrap_or_else(|| panic!("missing {name}"));
    let open = start + text[start..].find("= {").unwrap() + 3;
    let close = open + text[open..].find("};").unwrap();
    &text[open..close]
}

fn tokens(body: &str) -> impl Iterator<Item = &str> {
    body.split(|c: char| c == ',' || c == '{' || c == '}' || c.is_whitespace())
        .filter(|t| !t.is_empty())
}

fn number(token: &str) -> i64 {
    match token.strip_prefix("0x") {
        Some(hex) => i64::from_str_radix(hex, 16).unwrap(),
        None => token.parse().unwrap(),
    }
}

impl HeaderModel {
    pub fn parse(text: &str) -> Self {
        let ints = |name: &str| tokens(array_body(text, name)).map(number).collect::<Vec<_>>();
        let class_names = array_body(text, "hyperhd_class_names")
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.trim_matches('"').to_string())
            .collect();
        Self {
            n: define(text, "HYPERHD_N"),
            d: define(text, "HYPERHD_D"),
            classes: define(text, "HYPERHD_NUM_CLASSES"),
            width: define(text, "HYPERHD_WIDTH"),
            height: define(text, "HYPERHD_HEIGHT"),
            step: define(text, "HYPERHD_STEP"),
            proto_bytes: define(text, "HYPERHD_PROTO_BYTES"),
            count_sketch: define(text, "HYPERHD_COUNT_SKETCH") == 1,
            prototypes: ints("hyperhd_prototypes").into_iter().map(|v| v as u8).collect(),
            indices: ints("hyperhd_sparse_indices").into_iter().map(|v| v as u32).collect(),
            signs: ints("hyperhd_cs_signs").into_iter().map(|v| v as i8).collect(),
            flip_order: ints("hyperhd_flip_order").into_iter().map(|v| v as u32).collect(),
            class_names,
        }
    }

    fn bit(bytes: &[u8], i: usize) -> bool {
        bytes[i / 8] >> (i % 8) & 1 == 1
    }

    /// Straight-line sparse-bundling encode from the header arrays.
    pub fn encode(&self, img: &GrayImage) -> Vec<bool> {
        let n = self.n;
        let total = img.len();
        let mut counts = vec![0usize; n];
        for value in 0..256usize {
            let pixels: Vec<usize> = (0..total).filter(|&k| usize::from(img.pixels()[k]) == value).collect();
            if pixels.is_empty() {
                continue;
            }
            let mut bundle = vec![false; n];
            if self.count_sketch {
                let mut sums = vec![0i64; n];
                for &k in &pixels {
                    for j in 0..self.d {
                        sums[(self.indices[j] as usize + k) % n] += i64::from(self.signs[j]);
                    }
                }
                for i in 0..n {
                    bundle[i] = sums[i] >= 0;
                }
            } else {
                for &k in &pixels {
                    for j in 0..self.d {
                        bundle[(self.indices[j] as usize + k) % n] = true;
                    }
                }
            }
            for &f in &self.flip_order[..value * self.step] {
                bundle[f as usize] = !bundle[f as usize];
            }
            for i in 0..n {
                if bundle[i] {
                    counts[i] += pixels.len();
                }
            }
        }
        counts.iter().map(|&c| 2 * c > total).collect()
    }

    pub fn distances(&self, img: &GrayImage) -> Vec<usize> {
        let query = self.encode(img);
        (0..self.classes)
            .map(|c| {
                let proto = &self.prototypes[c * self.proto_bytes..(c + 1) * self.proto_bytes];
                (0..self.n).filter(|&i| Self::bit(proto, i) != query[i]).count()
            })
            .collect()
    }

    pub fn predict(&self, img: &GrayImage) -> usize {
        let d = self.distances(img);
        let best = *d.iter().min().unwrap();
        d.iter().position(|&x| x == best).unwrap()
    }
}

/// Sections of an `HHDM` model file located by walking its layout.
pub struct ModelSections<'a> {
    pub indices: &'a [u8],
    pub signs: &'a [u8],
    pub flip_order: &'a [u8],
    pub prototypes: &'a [u8],
    pub flip_u16: bool,
}

impl<'a> ModelSections<'a> {
    pub fn locate(bytes: &'a [u8]) -> Self {
        let u16_at = |p: usize| u16::from_le_bytes([bytes[p], bytes[p + 1]]) as usize;
        let u32_at = |p: usize| u32::from_le_bytes(bytes[p..p + 4].try_into().unwrap()) as usize;
        assert_eq!(&bytes[..4], b"HHDM");
        let flip_u16 = u16_at(6) & 1 == 1;
        let (n, d) = (u32_at(8), u32_at(12));
        let classes = u16_at(34);
        let mut p = 36;
        for _ in 0..classes {
            p += 2 + u16_at(p);
        }
        let take = |p: &mut usize, len: usize| {
            let s = &bytes[*p..*p + len];
            *p += len;
            s
        };
        let indices = take(&mut p, 4 * d);
        let signs = take(&mut p, d);
        let flip_order = take(&mut p, if flip_u16 { 2 } else { 4 } * n);
        let prototypes = take(&mut p, classes * n.div_ceil(8));
        assert_eq!(p + 4, bytes.len());
        Self {
            indices,
            signs,
            flip_order,
            prototypes,
            flip_u16,
        }
    }
}
