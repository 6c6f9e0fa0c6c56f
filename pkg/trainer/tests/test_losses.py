import pytest
import torch
import torch.nn.functional as F

from forgefit import focal_loss, ssim_loss


class TestSsimLoss:
    def test_identical_inputs_zero(self):
        torch.manual_seed(0)
        a = torch.rand(2, 3, 32, 32, dtype=torch.float64)
        assert float(ssim_loss(a, a)) == pytest.approx(0.0, abs=1e-12)

    def test_constant_zero_vs_one(self):
        zero = torch.zeros(1, 3, 24, 24, dtype=torch.float64)
        one = torch.ones(1, 3, 24, 24, dtype=torch.float64)
        # closed form for two constants: 1 - C1/(1 + C1) with C1 = 1e-4
        loss = float(ssim_loss(zero, one))
        assert loss >= 0.99
        assert loss == pytest.approx(1.0 - 1e-4 / (1.0 + 1e-4), abs=1e-9)

    def test_symmetry(self):
        torch.manual_seed(1)
        a = torch.rand(2, 3, 32, 32, dtype=torch.float64)
        b = torch.rand(2, 3, 32, 32, dtype=torch.float64)
        assert abs(float(ssim_loss(a, b)) - float(ssim_loss(b, a))) <= 1e-10

    def test_bounded(self):
        torch.manual_seed(2)
        for _ in range(5):
            a = torch.rand(1, 3, 24, 24, dtype=torch.float64)
            b = torch.rand(1, 3, 24, 24, dtype=torch.float64)
            loss = float(ssim_loss(a, b))
            assert 0.0 <= loss <= 2.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            ssim_loss(torch.zeros(1, 3, 16, 16), torch.zeros(1, 3, 16, 17))

    def test_differentiable(self):
        a = torch.rand(1, 3, 24, 24, requires_grad=True)
        loss = ssim_loss(a, torch.rand(1, 3, 24, 24))
        loss.backward()
        assert a.grad is not None
        assert torch.isfinite(a.grad).all()


class TestFocalLoss:
    def test_perfect_prediction_near_zero(self):
        gt = (torch.rand(8, 8) > 0.5).double()
        assert float(focal_loss(gt.clone(), gt)) <= 1e-6

    def test_gamma_zero_is_bce(self):
        torch.manual_seed(3)
        pred = torch.rand(6, 6, dtype=torch.float64) * 0.9 + 0.05
        gt = (torch.rand(6, 6) > 0.5).double()
        ours = float(focal_loss(pred, gt, gamma=0.0))
        bce = float(F.binary_cross_entropy(pred.clamp(1e-7, 1 - 1e-7), gt))
        assert ours == pytest.approx(bce, abs=1e-10)

    def test_gradient_matches_finite_differences(self):
        torch.manual_seed(4)
        pred = (torch.rand(4, 4, dtype=torch.float64) * 0.8 + 0.1).requires_grad_(True)
        gt = (torch.rand(4, 4) > 0.5).double()
        focal_loss(pred, gt, gamma=2.0).backward()
        h = 1e-6
        fd = torch.zeros_like(pred)
        with torch.no_grad():
            for i in range(4):
                for j in range(4):
                    plus = pred.detach().clone()
                    minus = pred.detach().clone()
                    plus[i, j] += h
                    minus[i, j] -= h
                    fd[i, j] = (
                        focal_loss(plus, gt, 2.0) - focal_loss(minus, gt, 2.0)
                    ) / (2 * h)
        rel = float((pred.grad - fd).abs().max() / fd.abs().max())
        assert rel <= 1e-4

    def test_hard_examples_weighted_up(self):
        gt = torch.ones(4, 4, dtype=torch.float64)
        confident = torch.full((4, 4), 0.9, dtype=torch.float64)
        unsure = torch.full((4, 4), 0.3, dtype=torch.float64)
        assert float(focal_loss(unsure, gt)) > float(focal_loss(confident, gt))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            focal_loss(torch.rand(4, 4), torch.zeros(4, 5))
