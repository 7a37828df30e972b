# No-U-Turn sampler with the slice-variable doubling tree and dual-averaging step size
# adaptation during burn-in. Unit mass matrix.

import logging

import numpy as np

from samplers.sampler import Sampler

logger = logging.getLogger(__name__)

# Trajectories whose joint log density drops more than this below the slice are divergent
MAX_ENERGY_ERROR = 1000.0
# Dual averaging constants
GAMMA = 0.05
T0 = 10.0
KAPPA = 0.75
MAX_STEP_SEARCH = 100


class NUTS(Sampler):
    name = "NUTS"
    needs_gradient = True

    def __init__(self, target, config=None):
        super().__init__(target, config)
        self.epsilon = self.config.step_size
        self.target_accept = self.config.target_accept
        self.max_depth = self.config.max_depth
        self.tree_depths = []
        self._mu = None
        self._h_bar = 0.0
        self._log_epsilon_bar = 0.0

    def set_state(self, x):
        super().set_state(x)
        self.logp, self.grad = self.log_density_and_gradient(self.state)

    # ---------------------------------------------------------------- dynamics

    def leapfrog(self, theta, r, grad, epsilon):
        r_half = r + 0.5 * epsilon * grad
        theta_new = theta + epsilon * r_half
        logp_new, grad_new = self.log_density_and_gradient(theta_new)
        r_new = r_half + 0.5 * epsilon * grad_new
        return theta_new, r_new, grad_new, logp_new

    def find_reasonable_epsilon(self, rng):
        """Double or halve a unit step until the one-step acceptance probability crosses 1/2."""
        epsilon = 1.0
        r = rng.standard_normal(self.state.shape)
        joint = self.logp - 0.5 * r @ r

        def log_acceptance(step):
            _, r_new, _, logp_new = self.leapfrog(self.state, r, self.grad, step)
            if not np.isfinite(logp_new):
                return -np.inf
            return logp_new - 0.5 * r_new @ r_new - joint

        log_ratio = log_acceptance(epsilon)
        direction = 1.0 if log_ratio > np.log(0.5) else -1.0
        for _ in range(MAX_STEP_SEARCH):
            if not direction * log_ratio > -direction * np.log(2.0):
                break
            epsilon *= 2.0 ** direction
            log_ratio = log_acceptance(epsilon)
        return epsilon

    def build_tree(self, theta, r, grad, log_u, direction, depth, epsilon, joint0, rng):
        """
        Recursively build a subtree of 2^depth leapfrog steps in the given direction.

        :return: {tuple} (theta_minus, r_minus, grad_minus, theta_plus, r_plus, grad_plus,
                 theta_prime, grad_prime, logp_prime, n_prime, s_prime, alpha_sum, n_alpha)
        """
        if depth == 0:
            theta1, r1, grad1, logp1 = self.leapfrog(theta, r, grad, direction * epsilon)
            joint = logp1 - 0.5 * r1 @ r1 if np.isfinite(logp1) else -np.inf
            n_prime = int(log_u <= joint)
            s_prime = int(joint > log_u - MAX_ENERGY_ERROR)
            if not s_prime:
                self.divergences += 1
            alpha = min(1.0, np.exp(joint - joint0)) if np.isfinite(joint) else 0.0
            return theta1, r1, grad1, theta1, r1, grad1, theta1, grad1, logp1, n_prime, s_prime, alpha, 1

        (theta_minus, r_minus, grad_minus, theta_plus, r_plus, grad_plus, theta_prime, grad_prime, logp_prime,
         n_prime, s_prime, alpha, n_alpha) = self.build_tree(theta, r, grad, log_u, direction, depth - 1,
                                                             epsilon, joint0, rng)
        if s_prime:
            if direction == -1:
                (theta_minus, r_minus, grad_minus, _, _, _, theta2, grad2, logp2, n2, s2, alpha2,
                 n_alpha2) = self.build_tree(theta_minus, r_minus, grad_minus, log_u, direction, depth - 1,
                                             epsilon, joint0, rng)
            else:
                (_, _, _, theta_plus, r_plus, grad_plus, theta2, grad2, logp2, n2, s2, alpha2,
                 n_alpha2) = self.build_tree(theta_plus, r_plus, grad_plus, log_u, direction, depth - 1,
                                             epsilon, joint0, rng)
            if n2 > 0 and rng.uniform() < n2 / max(n_prime + n2, 1):
                theta_prime, grad_prime, logp_prime = theta2, grad2, logp2
            span = theta_plus - theta_minus
            s_prime = int(s2 and span @ r_minus >= 0 and span @ r_plus >= 0)
            n_prime += n2
            alpha += alpha2
            n_alpha += n_alpha2
        return (theta_minus, r_minus, grad_minus, theta_plus, r_plus, grad_plus, theta_prime, grad_prime,
                logp_prime, n_prime, s_prime, alpha, n_alpha)

    # ---------------------------------------------------------------- transition

    def step(self, rng):
        if self.epsilon is None:
            self.epsilon = self.find_reasonable_epsilon(rng)
            logger.debug("NUTS: initial step size %.4g", self.epsilon)

        r0 = rng.standard_normal(self.state.shape)
        joint0 = self.logp - 0.5 * r0 @ r0
        log_u = joint0 + np.log(rng.uniform())

        theta_minus = theta_plus = self.state
        r_minus = r_plus = r0
        grad_minus = grad_plus = self.grad
        new_state, new_logp, new_grad = self.state, self.logp, self.grad
        n, keep_going, depth = 1, True, 0
        alpha, n_alpha = 0.0, 1

        while keep_going and depth < self.max_depth:
            direction = -1 if rng.uniform() < 0.5 else 1
            if direction == -1:
                (theta_minus, r_minus, grad_minus, _, _, _, theta_prime, grad_prime, logp_prime, n_prime, s_prime,
                 alpha, n_alpha) = self.build_tree(theta_minus, r_minus, grad_minus, log_u, direction, depth,
                                                   self.epsilon, joint0, rng)
            else:
                (_, _, _, theta_plus, r_plus, grad_plus, theta_prime, grad_prime, logp_prime, n_prime, s_prime,
                 alpha, n_alpha) = self.build_tree(theta_plus, r_plus, grad_plus, log_u, direction, depth,
                                                   self.epsilon, joint0, rng)
            if s_prime and n_prime > 0 and rng.uniform() < min(1.0, n_prime / n):
                new_state, new_logp, new_grad = theta_prime, logp_prime, grad_prime
            n += n_prime
            span = theta_plus - theta_minus
            keep_going = bool(s_prime and span @ r_minus >= 0 and span @ r_plus >= 0)
            depth += 1

        self.state, self.logp, self.grad = np.array(new_state), new_logp, new_grad
        self.tree_depths.append(depth)
        return alpha / n_alpha

    # ---------------------------------------------------------------- adaptation

    def tune(self, iteration, acceptance):
        if self._mu is None:
            self._mu = np.log(10.0 * self.epsilon)
        m = iteration + 1
        eta = 1.0 / (m + T0)
        self._h_bar = (1.0 - eta) * self._h_bar + eta * (self.target_accept - acceptance)
        log_epsilon = self._mu - np.sqrt(m) / GAMMA * self._h_bar
        weight = m ** -KAPPA
        self._log_epsilon_bar = weight * log_epsilon + (1.0 - weight) * self._log_epsilon_bar
        self.epsilon = float(np.exp(log_epsilon))
        self.adaptation_trace.append(self.epsilon)

    def end_burn_in(self):
        if self._mu is not None:
            self.epsilon = float(np.exp(self._log_epsilon_bar))
        logger.info("NUTS: adapted step size %.4g", self.epsilon)
