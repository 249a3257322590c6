//! Three `[conv3x3 → batch norm → ReLU → avgpool2]` blocks, global average
//! pooling and a linear head.

use super::model::{cross_entropy, Classifier, Param};
use super::tensor::{gemm, Batch};
use crate::classifier::Logits;
use crate::par;

pub const WIDTHS: [usize; 3] = [32, 64, 128];
const BN_EPS: f64 = 1e-5;
const BN_MOMENTUM: f64 = 0.1;
const GRAD_GROUPS: usize = 8;

#[derive(Debug, Clone)]
struct Block {
    cin: usize,
    cout: usize,
    conv: Param,
    gamma: Param,
    beta: Param,
    running_mean: Param,
    running_var: Param,
}

#[derive(Debug, Clone)]
pub struct SmallConvNet {
    classes: usize,
    blocks: Vec<Block>,
    fc_weight: Param,
    fc_bias: Param,
}

struct BlockTrace {
    input: Vec<f64>,
    h: usize,
    w: usize,
    xhat: Vec<f64>,
    pre_relu: Vec<f64>,
    invstd: Vec<f64>,
    batch_mean: Vec<f64>,
    batch_var: Vec<f64>,
}

struct Trace {
    blocks: Vec<BlockTrace>,
    feat: Vec<f64>,
    final_hw: (usize, usize),
    logits: Vec<f64>,
}

fn im2col(x: &[f64], cin: usize, h: usize, w: usize, col: &mut [f64]) {
    let hw = h * w;
    for ci in 0..cin {
        let plane = &x[ci * hw..(ci + 1) * hw];
        for ky in 0..3 {
            for kx in 0..3 {
                let row = &mut col[(ci * 9 + ky * 3 + kx) * hw..][..hw];
                for y in 0..h {
                    let sy = y as isize + ky as isize - 1;
                    let dst = &mut row[y * w..(y + 1) * w];
                    if sy < 0 || sy >= h as isize {
                        dst.fill(0.0);
                        continue;
                    }
                    let src = &plane[sy as usize * w..(sy as usize + 1) * w];
                    for (x, d) in dst.iter_mut().enumerate() {
                        let sx = x as isize + kx as isize - 1;
                        *d = if sx < 0 || sx >= w as isize {
                            0.0
                        } else {
                            src[sx as usize]
                        };
                    }
                }
            }
        }
    }
}

/// Adjoint of [`im2col`]: scatters column gradients back onto the input.
fn col2im(col: &[f64], cin: usize, h: usize, w: usize, dx: &mut [f64]) {
    let hw = h * w;
    for ci in 0..cin {
        let plane = &mut dx[ci * hw..(ci + 1) * hw];
        for ky in 0..3 {
            for kx in 0..3 {
                let row = &col[(ci * 9 + ky * 3 + kx) * hw..][..hw];
                for y in 0..h {
                    let sy = y as isize + ky as isize - 1;
                    if sy < 0 || sy >= h as isize {
                        continue;
                    }
                    for x in 0..w {
                        let sx = x as isize + kx as isize - 1;
                        if sx >= 0 && sx < w as isize {
                            plane[sy as usize * w + sx as usize] += row[y * w + x];
                        }
                    }
                }
            }
        }
    }
}

fn conv_forward(
    x: &[f64],
    n: usize,
    cin: usize,
    h: usize,
    w: usize,
    weight: &[f64],
    cout: usize,
) -> Vec<f64> {
    let hw = h * w;
    let k = cin * 9;
    let mut out = vec![0.0; n * cout * hw];
    if n == 0 {
        return out;
    }
    par::for_each_chunk_mut(&mut out, cout * hw, |i, o| {
        let mut col = vec![0.0; k * hw];
        im2col(&x[i * cin * hw..(i + 1) * cin * hw], cin, h, w, &mut col);
        gemm(cout, k, hw, weight, false, &col, false, 0.0, o);
    });
    out
}

/// Weight gradient and, when asked, the input gradient. Samples are
/// reduced in a fixed grouping so results do not depend on thread count.
#[allow(clippy::too_many_arguments)]
fn conv_backward(
    x: &[f64],
    dout: &[f64],
    n: usize,
    cin: usize,
    h: usize,
    w: usize,
    weight: &[f64],
    cout: usize,
    need_dx: bool,
) -> (Vec<f64>, Vec<f64>) {
    let hw = h * w;
    let k = cin * 9;
    let group = n.div_ceil(GRAD_GROUPS).max(1);
    let groups = n.div_ceil(group);
    let parts = par::map_range(groups, |g| {
        let lo = g * group;
        let hi = (lo + group).min(n);
        let mut dw = vec![0.0; cout * k];
        let mut dx = if need_dx {
            vec![0.0; (hi - lo) * cin * hw]
        } else {
            Vec::new()
        };
        let mut col = vec![0.0; k * hw];
        let mut dcol = vec![0.0; if need_dx { k * hw } else { 0 }];
        for i in lo..hi {
            let d = &dout[i * cout * hw..(i + 1) * cout * hw];
            im2col(&x[i * cin * hw..(i + 1) * cin * hw], cin, h, w, &mut col);
            gemm(cout, hw, k, d, false, &col, true, 1.0, &mut dw);
            if need_dx {
                gemm(k, cout, hw, weight, true, d, false, 0.0, &mut dcol);
                col2im(
                    &dcol,
                    cin,
                    h,
                    w,
                    &mut dx[(i - lo) * cin * hw..(i - lo + 1) * cin * hw],
                );
            }
        }
        (dw, dx)
    });
    let mut dw = vec![0.0; cout * k];
    let mut dx = Vec::with_capacity(if need_dx { n * cin * hw } else { 0 });
    for (pw, px) in parts {
        for (a, b) in dw.iter_mut().zip(pw) {
            *a += b;
        }
        dx.extend(px);
    }
    (dw, dx)
}

fn avgpool2(x: &[f64], n: usize, c: usize, h: usize, w: usize) -> Vec<f64> {
    let (h2, w2) = (h / 2, w / 2);
    let mut out = vec![0.0; n * c * h2 * w2];
    for (p, o) in out.chunks_exact_mut(h2 * w2).enumerate() {
        let plane = &x[p * h * w..(p + 1) * h * w];
        for y in 0..h2 {
            for xx in 0..w2 {
                let s = plane[2 * y * w + 2 * xx]
                    + plane[2 * y * w + 2 * xx + 1]
                    + plane[(2 * y + 1) * w + 2 * xx]
                    + plane[(2 * y + 1) * w + 2 * xx + 1];
                o[y * w2 + xx] = 0.25 * s;
            }
        }
    }
    out
}

fn avgpool2_backward(dp: &[f64], n: usize, c: usize, h: usize, w: usize) -> Vec<f64> {
    let (h2, w2) = (h / 2, w / 2);
    let mut dx = vec![0.0; n * c * h * w];
    for (p, plane) in dx.chunks_exact_mut(h * w).enumerate() {
        let g = &dp[p * h2 * w2..(p + 1) * h2 * w2];
        for y in 0..2 * h2 {
            for x in 0..2 * w2 {
                plane[y * w + x] = 0.25 * g[(y / 2) * w2 + x / 2];
            }
        }
    }
    dx
}

impl SmallConvNet {
    pub fn new(classes: usize, seed: u64) -> Self {
        let mut blocks = Vec::with_capacity(WIDTHS.len());
        let mut cin = 3;
        for (b, &cout) in WIDTHS.iter().enumerate() {
            let std = (2.0 / (cin * 9) as f64).sqrt();
            let tag = |s: &str| format!("block{}.{s}", b + 1);
            blocks.push(Block {
                cin,
                cout,
                conv: Param::normal(&tag("conv.weight"), &[cout, cin, 3, 3], std, seed, b as u64),
                gamma: Param::filled(&tag("bn.weight"), &[cout], 1.0, true),
                beta: Param::zeros(&tag("bn.bias"), &[cout], true),
                running_mean: Param::zeros(&tag("bn.running_mean"), &[cout], false),
                running_var: Param::filled(&tag("bn.running_var"), &[cout], 1.0, false),
            });
            cin = cout;
        }
        let feat = WIDTHS[WIDTHS.len() - 1];
        Self {
            classes,
            blocks,
            fc_weight: Param::uniform(
                "fc.weight",
                &[classes, feat],
                1.0 / (feat as f64).sqrt(),
                seed,
                99,
            ),
            fc_bias: Param::zeros("fc.bias", &[classes], true),
        }
    }

    fn run(&self, x: &Batch, train: bool, keep: bool) -> Trace {
        assert_eq!(x.c, 3, "expected RGB input");
        assert!(
            x.h >= 8 && x.w >= 8,
            "input {}x{} too small for three poolings",
            x.h,
            x.w
        );
        let n = x.n;
        let (mut h, mut w) = (x.h, x.w);
        let mut act = x.data.clone();
        let mut traces = Vec::new();
        for blk in &self.blocks {
            let hw = h * w;
            let z = conv_forward(&act, n, blk.cin, h, w, &blk.conv.value, blk.cout);
            let m = (n * hw) as f64;
            let mut mean = vec![0.0; blk.cout];
            let mut var = vec![0.0; blk.cout];
            for c in 0..blk.cout {
                if train {
                    let mut s = 0.0;
                    for i in 0..n {
                        s += z[(i * blk.cout + c) * hw..][..hw].iter().sum::<f64>();
                    }
                    let mu = s / m;
                    let mut q = 0.0;
                    for i in 0..n {
                        q += z[(i * blk.cout + c) * hw..][..hw]
                            .iter()
                            .map(|v| (v - mu) * (v - mu))
                            .sum::<f64>();
                    }
                    mean[c] = mu;
                    var[c] = q / m;
                } else {
                    mean[c] = blk.running_mean.value[c];
                    var[c] = blk.running_var.value[c];
                }
            }
            let invstd: Vec<f64> = var.iter().map(|v| 1.0 / (v + BN_EPS).sqrt()).collect();
            let mut xhat = z;
            let mut pre = vec![0.0; xhat.len()];
            for (p, (xh, pr)) in xhat
                .chunks_exact_mut(hw)
                .zip(pre.chunks_exact_mut(hw))
                .enumerate()
            {
                let c = p % blk.cout;
                let (g, b) = (blk.gamma.value[c], blk.beta.value[c]);
                for (v, o) in xh.iter_mut().zip(pr.iter_mut()) {
                    *v = (*v - mean[c]) * invstd[c];
                    *o = g * *v + b;
                }
            }
            let relu: Vec<f64> = pre.iter().map(|v| v.max(0.0)).collect();
            let pooled = avgpool2(&relu, n, blk.cout, h, w);
            let input = std::mem::replace(&mut act, pooled);
            if keep {
                traces.push(BlockTrace {
                    input,
                    h,
                    w,
                    xhat,
                    pre_relu: pre,
                    invstd,
                    batch_mean: mean,
                    batch_var: var,
                });
            }
            h /= 2;
            w /= 2;
        }
        let cf = WIDTHS[WIDTHS.len() - 1];
        let hw = h * w;
        let feat: Vec<f64> = act
            .chunks_exact(hw)
            .map(|p| p.iter().sum::<f64>() / hw as f64)
            .collect();
        let mut logits = vec![0.0; n * self.classes];
        for row in logits.chunks_exact_mut(self.classes) {
            row.copy_from_slice(&self.fc_bias.value);
        }
        gemm(
            n,
            cf,
            self.classes,
            &feat,
            false,
            &self.fc_weight.value,
            true,
            1.0,
            &mut logits,
        );
        Trace {
            blocks: traces,
            feat,
            final_hw: (h, w),
            logits,
        }
    }
}

impl Classifier for SmallConvNet {
    fn num_classes(&self) -> usize {
        self.classes
    }

    fn forward(&self, x: &Batch) -> Logits {
        Logits::new(self.classes, self.run(x, false, false).logits)
    }

    fn train_loss(&self, x: &Batch, labels: &[usize]) -> f64 {
        cross_entropy(&self.run(x, true, false).logits, self.classes, labels).0
    }

    fn loss_and_grad(&mut self, x: &Batch, labels: &[usize]) -> f64 {
        let n = x.n;
        let trace = self.run(x, true, true);
        let (loss, dlogits) = cross_entropy(&trace.logits, self.classes, labels);
        let cf = WIDTHS[WIDTHS.len() - 1];

        gemm(
            self.classes,
            n,
            cf,
            &dlogits,
            true,
            &trace.feat,
            false,
            0.0,
            &mut self.fc_weight.grad,
        );
        self.fc_bias.grad.fill(0.0);
        for row in dlogits.chunks_exact(self.classes) {
            for (g, d) in self.fc_bias.grad.iter_mut().zip(row) {
                *g += d;
            }
        }
        let mut dfeat = vec![0.0; n * cf];
        gemm(
            n,
            self.classes,
            cf,
            &dlogits,
            false,
            &self.fc_weight.value,
            false,
            0.0,
            &mut dfeat,
        );
        let (fh, fw) = trace.final_hw;
        let area = (fh * fw) as f64;
        let mut dact: Vec<f64> = dfeat
            .iter()
            .flat_map(|&d| std::iter::repeat_n(d / area, fh * fw))
            .collect();

        for (b, (blk, tr)) in self.blocks.iter_mut().zip(&trace.blocks).enumerate().rev() {
            let (h, w) = (tr.h, tr.w);
            let hw = h * w;
            let m = (n * hw) as f64;
            let mut dy = avgpool2_backward(&dact, n, blk.cout, h, w);
            for (d, &p) in dy.iter_mut().zip(&tr.pre_relu) {
                if p <= 0.0 {
                    *d = 0.0;
                }
            }
            let mut sum_dy = vec![0.0; blk.cout];
            let mut sum_dy_xhat = vec![0.0; blk.cout];
            for (p, (d, xh)) in dy
                .chunks_exact(hw)
                .zip(tr.xhat.chunks_exact(hw))
                .enumerate()
            {
                let c = p % blk.cout;
                for (a, b) in d.iter().zip(xh) {
                    sum_dy[c] += a;
                    sum_dy_xhat[c] += a * b;
                }
            }
            blk.gamma.grad.copy_from_slice(&sum_dy_xhat);
            blk.beta.grad.copy_from_slice(&sum_dy);
            for (p, (d, xh)) in dy
                .chunks_exact_mut(hw)
                .zip(tr.xhat.chunks_exact(hw))
                .enumerate()
            {
                let c = p % blk.cout;
                let k = blk.gamma.value[c] * tr.invstd[c] / m;
                for (a, b) in d.iter_mut().zip(xh) {
                    *a = k * (m * *a - sum_dy[c] - b * sum_dy_xhat[c]);
                }
            }
            let (dw, dx) = conv_backward(
                &tr.input,
                &dy,
                n,
                blk.cin,
                h,
                w,
                &blk.conv.value,
                blk.cout,
                b > 0,
            );
            blk.conv.grad = dw;
            dact = dx;

            let unbias = if m > 1.0 { m / (m - 1.0) } else { 1.0 };
            for c in 0..blk.cout {
                let rm = &mut blk.running_mean.value[c];
                *rm = (1.0 - BN_MOMENTUM) * *rm + BN_MOMENTUM * tr.batch_mean[c];
                let rv = &mut blk.running_var.value[c];
                *rv = (1.0 - BN_MOMENTUM) * *rv + BN_MOMENTUM * tr.batch_var[c] * unbias;
            }
        }
        loss
    }

    fn params(&self) -> Vec<&Param> {
        let mut v = Vec::new();
        for b in &self.blocks {
            v.extend([&b.conv, &b.gamma, &b.beta, &b.running_mean, &b.running_var]);
        }
        v.extend([&self.fc_weight, &self.fc_bias]);
        v
    }

    fn params_mut(&mut self) -> Vec<&mut Param> {
        let mut v = Vec::new();
        for b in &mut self.blocks {
            v.extend([
                &mut b.conv,
                &mut b.gamma,
                &mut b.beta,
                &mut b.running_mean,
                &mut b.running_var,
            ]);
        }
        v.extend([&mut self.fc_weight, &mut self.fc_bias]);
        v
    }
}
