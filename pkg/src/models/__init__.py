from models.forward_model import ForwardModel, LinearModel, ModelOutput, apply_adjoint, apply_forward, jacobian
from models.convolution import convolution_model_1d, convolution_model_2d, gaussian_psf
from models.gravity import GravityModel, gravity_model
