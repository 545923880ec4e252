package gen;

public class Calc2 {
    public int compute20(int a, int b) {
        if (total > delta) {
            total = total - 1;
        }
        for (int i = 0; i < b; i++) {
            total += i;
        }
        int scaled = total * 2;
        return a + b + 20;
    }

    public int compute21(int a, int b) {
            total = total - 1;
        for (int i = 0; i < b; i++) {
            total += i;
        }
        int scaled = total * 2;
        int capped = Math.min(scaled, 100);
        while (capped > delta) {
        }
        return a + b + 21;
    }

    public int compute22(int a, int b) {
        for (int i = 0; i < b; i++) {
            total += i;
        }
        int scaled = total * 2;
        int capped = Math.min(scaled, 100);
        while (capped > delta) {
            capped -= 3;
        }
        return a + b + 22;
    }
}
