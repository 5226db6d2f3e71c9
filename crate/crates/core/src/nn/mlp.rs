use crate::error::{Error, Result};
use crate::rng::Prng;

use super::matrix::{axpy, dot, Matrix, Scalar};

/// Negative slope of the hidden-layer leaky ReLU.
pub const LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    LeakyRelu,
    Tanh,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply<T: Scalar>(self, x: T) -> T {
        match self {
            Activation::LeakyRelu => {
                if x > T::zero() {
                    x
                } else {
                    T::lit(LEAKY_SLOPE) * x
                }
            }
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => T::one() / (T::one() + (-x).exp()),
        }
    }

    /// Derivative expressed through the activation's own output, which is
    /// what the tape keeps.
    #[inline]
    fn derivative_at_output<T: Scalar>(self, y: T) -> T {
        match self {
            Activation::LeakyRelu => {
                if y > T::zero() {
                    T::one()
                } else {
                    T::lit(LEAKY_SLOPE)
                }
            }
            Activation::Tanh => T::one() - y * y,
            Activation::Sigmoid => y * (T::one() - y),
        }
    }
}

/// Architecture of a fully connected network: widths `[d0, d1, ..., dL]`,
/// leaky ReLU after every hidden layer and `output` after the last one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlpSpec {
    layer_dims: Vec<usize>,
    output: Activation,
}

impl MlpSpec {
    pub fn new(layer_dims: Vec<usize>, output: Activation) -> Result<Self> {
        if layer_dims.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "an MLP needs at least input and output widths, got {layer_dims:?}"
            )));
        }
        if layer_dims.contains(&0) {
            return Err(Error::InvalidConfig(format!(
                "layer widths must be positive, got {layer_dims:?}"
            )));
        }
        Ok(MlpSpec { layer_dims, output })
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn output_activation(&self) -> Activation {
        self.output
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.layer_dims.len() - 1
    }

    pub fn activation(&self, layer: usize) -> Activation {
        if layer + 1 == self.num_layers() {
            self.output
        } else {
            Activation::LeakyRelu
        }
    }

    /// `(fan_in, fan_out)` of each affine layer.
    pub fn layer_shapes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.layer_dims.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn param_count(&self) -> usize {
        self.layer_shapes().map(|(i, o)| o * i + o).sum()
    }
}

/// Generator/discriminator pair architecture: generator
/// `latent -> gen_hidden -> gen_hidden -> data` with tanh output,
/// discriminator `data -> disc_hidden -> disc_hidden -> 1` with sigmoid output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GanArch {
    pub latent_dim: usize,
    pub gen_hidden: usize,
    pub disc_hidden: usize,
    pub data_dim: usize,
}

impl GanArch {
    /// The MNIST GAN: 64-dim latent, 64 hidden units in both networks.
    pub const MNIST: GanArch = GanArch {
        latent_dim: 64,
        gen_hidden: 64,
        disc_hidden: 64,
        data_dim: 784,
    };

    pub fn symmetric(latent_dim: usize, hidden_dim: usize, data_dim: usize) -> Self {
        GanArch {
            latent_dim,
            gen_hidden: hidden_dim,
            disc_hidden: hidden_dim,
            data_dim,
        }
    }

    pub fn generator_spec(&self) -> Result<MlpSpec> {
        MlpSpec::new(
            vec![
                self.latent_dim,
                self.gen_hidden,
                self.gen_hidden,
                self.data_dim,
            ],
            Activation::Tanh,
        )
    }

    pub fn discriminator_spec(&self) -> Result<MlpSpec> {
        MlpSpec::new(
            vec![self.data_dim, self.disc_hidden, self.disc_hidden, 1],
            Activation::Sigmoid,
        )
    }

    pub fn param_count(&self) -> Result<usize> {
        Ok(param_count(
            &self.generator_spec()?,
            &self.discriminator_spec()?,
        ))
    }
}

/// Total parameters of a generator/discriminator pair.
pub fn param_count(generator: &MlpSpec, discriminator: &MlpSpec) -> usize {
    generator.param_count() + discriminator.param_count()
}

/// One affine layer. `weights` is `fan_out x fan_in`, row per output unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer<T = f32> {
    pub weights: Matrix<T>,
    pub bias: Vec<T>,
}

impl<T: Scalar> Layer<T> {
    fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Layer {
            weights: Matrix::zeros(fan_out, fan_in),
            bias: vec![T::zero(); fan_out],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<T = f32> {
    spec: MlpSpec,
    layers: Vec<Layer<T>>,
}

/// Activations cached by [`Mlp::forward`]: the network input followed by the
/// post-activation output of every layer.
#[derive(Debug, Clone)]
pub struct Tape<T = f32> {
    activations: Vec<Matrix<T>>,
}

impl<T: Scalar> Tape<T> {
    pub fn output(&self) -> &Matrix<T> {
        self.activations.last().unwrap()
    }

    pub fn into_output(mut self) -> Matrix<T> {
        self.activations.pop().unwrap()
    }

    pub fn batch_size(&self) -> usize {
        self.activations[0].rows()
    }
}

/// Parameter gradients, summed over the batch, plus optionally the gradient
/// with respect to the network input.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T = f32> {
    pub layers: Vec<Layer<T>>,
    pub input: Option<Matrix<T>>,
}

impl<T: Scalar> Gradients<T> {
    /// Tensors in canonical order: `W1, b1, W2, b2, ...`.
    pub fn tensors(&self) -> Vec<&[T]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.bias.as_slice()])
            .collect()
    }

    pub fn add_assign(&mut self, other: &Gradients<T>) -> Result<()> {
        if self.layers.len() != other.layers.len() {
            return Err(Error::DimensionMismatch {
                what: "gradient layers",
                expected: self.layers.len(),
                found: other.layers.len(),
            });
        }
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            if a.bias.len() != b.bias.len() || a.weights.cols() != b.weights.cols() {
                return Err(Error::DimensionMismatch {
                    what: "gradient layer shape",
                    expected: a.weights.as_slice().len(),
                    found: b.weights.as_slice().len(),
                });
            }
            axpy(T::one(), b.weights.as_slice(), a.weights.as_mut_slice());
            axpy(T::one(), &b.bias, &mut a.bias);
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|x| x.is_finite()))
            && self.input.as_ref().is_none_or(|m| m.is_finite())
    }
}

/// Parameter gradients (if requested) and the input gradient (if requested).
type ReverseOut<T> = (Vec<Layer<T>>, Option<Matrix<T>>);

impl<T: Scalar> Mlp<T> {
    pub fn zeros(spec: &MlpSpec) -> Self {
        Mlp {
            spec: spec.clone(),
            layers: spec
                .layer_shapes()
                .map(|(i, o)| Layer::zeros(i, o))
                .collect(),
        }
    }

    /// Weights and biases drawn uniformly from `(-1/sqrt(fan_in), 1/sqrt(fan_in))`,
    /// layer by layer in canonical order.
    pub fn init(spec: &MlpSpec, prng: &mut Prng) -> Self {
        let mut net = Self::zeros(spec);
        for layer in &mut net.layers {
            let bound = 1.0 / (layer.weights.cols() as f64).sqrt();
            for w in layer.weights.as_mut_slice() {
                *w = prng.uniform_symmetric(bound);
            }
            for b in &mut layer.bias {
                *b = prng.uniform_symmetric(bound);
            }
        }
        net
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer<T>] {
        &mut self.layers
    }

    pub fn tensors(&self) -> Vec<&[T]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.bias.as_slice()])
            .collect()
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.bias.as_mut_slice()])
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|x| x.is_finite()))
    }

    pub fn forward(&self, input: &Matrix<T>) -> Result<Tape<T>> {
        if input.cols() != self.spec.input_dim() {
            return Err(Error::DimensionMismatch {
                what: "network input width",
                expected: self.spec.input_dim(),
                found: input.cols(),
            });
        }
        if !input.is_finite() {
            return Err(Error::NonFiniteInput("network input"));
        }
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(input.clone());
        for (idx, layer) in self.layers.iter().enumerate() {
            let act = self.spec.activation(idx);
            let x = activations.last().unwrap();
            let mut out = Matrix::zeros(x.rows(), layer.bias.len());
            for (b, xrow) in x.iter_rows().enumerate() {
                let orow = out.row_mut(b);
                for (o, y) in orow.iter_mut().enumerate() {
                    *y = act.apply(dot(layer.weights.row(o), xrow) + layer.bias[o]);
                }
            }
            activations.push(out);
        }
        Ok(Tape { activations })
    }

    /// Forward pass without keeping the tape.
    pub fn predict(&self, input: &Matrix<T>) -> Result<Matrix<T>> {
        Ok(self.forward(input)?.into_output())
    }

    /// Reverse-mode pass. `upstream` is dLoss/dOutput; gradients are summed
    /// over the batch, so a mean loss must fold its `1/B` into `upstream`.
    pub fn backward(
        &self,
        tape: &Tape<T>,
        upstream: &Matrix<T>,
        input_grad: bool,
    ) -> Result<Gradients<T>> {
        let (layers, input) = self.reverse(tape, upstream, true, input_grad)?;
        Ok(Gradients { layers, input })
    }

    /// Gradient with respect to the network input only, skipping parameter
    /// gradients. Used to push a loss through a frozen discriminator.
    pub fn input_gradient(&self, tape: &Tape<T>, upstream: &Matrix<T>) -> Result<Matrix<T>> {
        let (_, input) = self.reverse(tape, upstream, false, true)?;
        Ok(input.unwrap())
    }

    fn reverse(
        &self,
        tape: &Tape<T>,
        upstream: &Matrix<T>,
        param_grads: bool,
        input_grad: bool,
    ) -> Result<ReverseOut<T>> {
        let n = self.layers.len();
        if tape.activations.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                what: "tape depth",
                expected: n + 1,
                found: tape.activations.len(),
            });
        }
        let out = tape.output();
        if upstream.rows() != out.rows() || upstream.cols() != out.cols() {
            return Err(Error::DimensionMismatch {
                what: "upstream gradient",
                expected: out.rows() * out.cols(),
                found: upstream.rows() * upstream.cols(),
            });
        }

        let mut grads: Vec<Layer<T>> = if param_grads {
            self.spec
                .layer_shapes()
                .map(|(i, o)| Layer::zeros(i, o))
                .collect()
        } else {
            Vec::new()
        };

        // delta = dLoss / d(pre-activation) of the current layer
        let act = self.spec.activation(n - 1);
        let mut delta = Matrix::zeros(out.rows(), out.cols());
        for ((d, &g), &y) in delta
            .as_mut_slice()
            .iter_mut()
            .zip(upstream.as_slice())
            .zip(out.as_slice())
        {
            *d = g * act.derivative_at_output(y);
        }

        let mut input = None;
        for idx in (0..n).rev() {
            let layer = &self.layers[idx];
            let x = &tape.activations[idx];
            if param_grads {
                let grad = &mut grads[idx];
                for (b, drow) in delta.iter_rows().enumerate() {
                    let xrow = x.row(b);
                    for (o, &d) in drow.iter().enumerate() {
                        if d != T::zero() {
                            axpy(d, xrow, grad.weights.row_mut(o));
                        }
                        grad.bias[o] += d;
                    }
                }
            }
            if idx == 0 && !input_grad {
                break;
            }
            let mut dx = Matrix::zeros(x.rows(), x.cols());
            for (b, drow) in delta.iter_rows().enumerate() {
                let dxrow = dx.row_mut(b);
                for (o, &d) in drow.iter().enumerate() {
                    if d != T::zero() {
                        axpy(d, layer.weights.row(o), dxrow);
                    }
                }
            }
            if idx == 0 {
                input = Some(dx);
            } else {
                let prev = self.spec.activation(idx - 1);
                for (d, &y) in dx.as_mut_slice().iter_mut().zip(x.as_slice()) {
                    *d *= prev.derivative_at_output(y);
                }
                delta = dx;
            }
        }
        Ok((grads, input))
    }
}

impl Mlp<f32> {
    /// Lossless widening to `f64`.
    pub fn to_f64(&self) -> Mlp<f64> {
        Mlp {
            spec: self.spec.clone(),
            layers: self
                .layers
                .iter()
                .map(|l| Layer {
                    weights: Matrix::from_vec(
                        l.weights.rows(),
                        l.weights.cols(),
                        l.weights.as_slice().iter().map(|&x| x as f64).collect(),
                    )
                    .unwrap(),
                    bias: l.bias.iter().map(|&x| x as f64).collect(),
                })
                .collect(),
        }
    }
}
